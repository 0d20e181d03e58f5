"""Print the four reproduced tables (mapping examples and detection complexity)."""

import sys

from mdsmod.cli import main

if __name__ == "__main__":
    sys.exit(main(["tables", "--which", "all"]))
