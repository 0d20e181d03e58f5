"""LC-ML versus ML BER with the union bound for four small configurations.

Writes one CSV per curve into --outdir.  Extra flags (--seed, --max-frames,
--min-errors, --threads) are passed through to the preset runner.
"""

import sys

from mdsmod.cli import main

if __name__ == "__main__":
    args = sys.argv[1:]
    if "--outdir" not in args:
        args += ["--outdir", "results/fig8"]
    sys.exit(main(["preset", "fig8", *args]))
