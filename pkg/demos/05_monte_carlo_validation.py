# Monte Carlo validation of the analytic completion-time models.
#
# For a handful of (scheme, partitions, cluster) combinations this runs
# the seeded round simulator and compares the empirical mean completion
# time against the exact order-statistic expectation and against the
# logarithmic planning approximation. The simulated column should sit
# within a fraction of a percent of the exact one at 1e5 trials, while
# the approximation drifts by design as k approaches N.
#
# The script ends by invoking the command line sweep on a small cluster
# range so the CSV contract is visible end to end.
#
# Run: python3 demos/05_monte_carlo_validation.py

import subprocess
import sys
import tempfile
from pathlib import Path

from codedmm import CodeChoice, Scheme, empirical_vs_analytic

LAM = 2.0
TRIALS = 100_000

cases = [
    (CodeChoice(Scheme.MDS, 2), 10),
    (CodeChoice(Scheme.MDS, 4), 10),
    (CodeChoice(Scheme.POLYNOMIAL, 2), 10),
    (CodeChoice(Scheme.MATDOT, 3), 10),
    (CodeChoice(Scheme.PRODUCT, 2), 9),
    (CodeChoice(Scheme.REPETITION, 2), 10),
]

header = (
    f"{'scheme':<11} {'p':>2} {'N':>3} {'simulated':>10} {'exact':>10} "
    f"{'approx':>10} {'sim gap':>8} {'approx gap':>10}"
)
print(header)
print("-" * len(header))
for choice, n in cases:
    report = empirical_vs_analytic(choice, n, LAM, trials=TRIALS, master_seed=99)
    print(
        f"{choice.scheme.value:<11} {choice.partitions:>2} {n:>3} "
        f"{report.simulated_mean:>10.5f} {report.exact_time:>10.5f} "
        f"{report.approx_time:>10.5f} {report.sim_vs_exact:>8.2%} "
        f"{report.approx_vs_exact:>10.2%}"
    )

print()
print("same machinery through the command line, small cluster sweep:")
out = Path(tempfile.mkdtemp()) / "sweep.csv"
subprocess.run(
    [
        sys.executable, "-m", "codedmm.cli", "sweep",
        "--workers", "8", "9", "10",
        "--k-dim", "2000", "--l-dim", "5000",
        "--phi", "0.95", "--lam", "5",
        "--out", str(out),
    ],
    check=True,
)
print(out.read_text(), end="")
