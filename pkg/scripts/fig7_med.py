"""Within-set MED of APM(N,M,M,M) and IQM(N,M,M,sqrt M) against M^2-PSK and M^2-QAM.

Prints a CSV over log2(M) = 2, 4, ..., 10 and the log2(M) at which APM drops
below QAM.
"""

import csv
import sys

from mdsmod.analysis import apm_qam_crossover, med_comparison

if __name__ == "__main__":
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["log2m", "apm", "iqm", "psk", "qam"])
    for b in range(2, 11, 2):
        c = med_comparison(b)
        w.writerow([b, repr(c.apm), repr(c.iqm), repr(c.psk), repr(c.qam)])
    print(f"# APM falls below QAM at log2(M) = {apm_qam_crossover():.3f}", file=sys.stderr)
