# How the adaptive selector narrows the candidate pool.
#
# Selection is exhaustive: every (scheme, partition count) pair on the
# cluster is checked against feasibility, the storage budgets, and the
# success floor, and the survivor with the smallest expected completion
# time wins. This script walks one cluster through progressively tighter
# constraints, then lets the selector run many rounds with the
# straggling rate drawn fresh each time and tallies the winners.
#
# Run: python3 demos/04_adaptive_selection.py

from collections import Counter

from codedmm import (
    NoFeasibleCodeError,
    SelectionConstraints,
    candidate_exclusions,
    enumerate_candidates,
    run_iterations,
    select,
)

N = 9
DIMS = (2000, 2000)
LAM = 5.0

stages = [
    ("no budgets", SelectionConstraints(N, DIMS, 2 / 3)),
    (
        "worker storage <= 5e6",
        SelectionConstraints(N, DIMS, 2 / 3, storage_threshold_worker=5e6),
    ),
    (
        "+ success >= 0.9",
        SelectionConstraints(
            N, DIMS, 2 / 3, storage_threshold_worker=5e6, success_threshold=0.9
        ),
    ),
]

for label, constraints in stages:
    pool = enumerate_candidates(constraints)
    names = ", ".join(f"{c.scheme.value}:{c.partitions}" for c, _ in pool)
    print(f"{label:<22} {len(pool):>2} candidates  [{names}]")
    try:
        result = select(constraints, LAM)
        print(
            f"{'':<22} winner {result.choice.scheme.value} "
            f"p={result.choice.partitions}, "
            f"expected time {result.objective_time:.4f}"
        )
    except NoFeasibleCodeError as exc:
        print(f"{'':<22} {exc}")

print()
print("sample exclusion reasons at the tightest stage:")
reasons = candidate_exclusions(stages[-1][1])
for label in list(reasons)[:4]:
    print(f"  {label}: {reasons[label]}")

# 200 rounds with the straggling rate drawn uniformly from {2, ..., 10};
# the winner histogram shows how rarely the choice moves once storage
# pressure has thinned the pool.
print()
support = [float(v) for v in range(2, 11)]
traces = run_iterations(stages[-1][1], support, rounds=200, master_seed=3)
tally = Counter(
    (t.result.choice.scheme.value, t.result.choice.partitions)
    for t in traces
    if t.result is not None
)
print(f"winner histogram over {len(traces)} rounds, rate support {support[0]:g}..{support[-1]:g}:")
for (scheme, p), count in tally.most_common():
    print(f"  {scheme} p={p}: {count}")
