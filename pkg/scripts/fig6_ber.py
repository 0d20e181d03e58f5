"""BER at 4 bps: APM(4,2,8,2) and IQM(4,8,6) with LC-ML against 16-QAM with ML.

Writes one CSV per curve into --outdir.  Extra flags (--seed, --max-frames,
--min-errors, --threads) are passed through to the preset runner.
"""

import sys

from mdsmod.cli import main

if __name__ == "__main__":
    args = sys.argv[1:]
    if "--outdir" not in args:
        args += ["--outdir", "results/fig6"]
    sys.exit(main(["preset", "fig6", *args]))
