"""Decoding complexity per bit against N for M = 4 and M = 16."""

import sys
from pathlib import Path

from mdsmod.cli import main

if __name__ == "__main__":
    outdir = Path(sys.argv[1] if len(sys.argv) > 1 else "results/fig2")
    outdir.mkdir(parents=True, exist_ok=True)
    for m in (4, 16):
        main(["complexity", "--curves", "--m", str(m), "--output", str(outdir / f"zeta_m{m}.csv")])
