"""BER of IQM(4,4,4), APM(4,2,8) and APM(4,2,4,2) under ML detection.

Writes one CSV per curve into --outdir.  Extra flags (--seed, --max-frames,
--min-errors, --threads) are passed through to the preset runner.
"""

import sys

from mdsmod.cli import main

if __name__ == "__main__":
    args = sys.argv[1:]
    if "--outdir" not in args:
        args += ["--outdir", "results/fig5"]
    sys.exit(main(["preset", "fig5", *args]))
