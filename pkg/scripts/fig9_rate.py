"""Achievable-rate curves for the two desk-scale rate presets (4 and 5 bps).

Every codebook is kept at f <= 12 bits so the exhaustive inner sum stays
tractable.  Pass --samples to change the Monte-Carlo size (default 10^4).
"""

import sys

from mdsmod.cli import main

if __name__ == "__main__":
    args = sys.argv[1:]
    outdir = ["--outdir", "results/fig9"] if "--outdir" not in args else []
    code = 0
    for name in ("fig9a", "fig9b"):
        code = code or main(["preset", name, *outdir, *args])
    sys.exit(code)
