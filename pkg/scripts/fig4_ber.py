"""BER of APM(2,2,2), IQM(2,2,2) and BPSK under ML detection.

Writes one CSV per curve into --outdir.  Extra flags (--seed, --max-frames,
--min-errors, --threads) are passed through to the preset runner.
"""

import sys

from mdsmod.cli import main

if __name__ == "__main__":
    args = sys.argv[1:]
    if "--outdir" not in args:
        args += ["--outdir", "results/fig4"]
    sys.exit(main(["preset", "fig4", *args]))
