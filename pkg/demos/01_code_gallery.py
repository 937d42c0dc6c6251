# A tour of the five coding schemes on matrices small enough to read.
#
# Every scheme turns one product A^T B into N worker tasks such that a
# subset of completed tasks is enough to recover the result. The walk
# below encodes the same 4x4 problem five ways, knocks out as many
# workers as each code tolerates, and decodes from the survivors.
#
# Run: python3 demos/01_code_gallery.py

import numpy as np

from codedmm import (
    CodeChoice,
    Scheme,
    decodable,
    decode,
    encode,
    recovery_threshold,
    worker_output,
)

rng = np.random.default_rng(7)
L, K = 4, 4
A = rng.integers(-3, 4, size=(L, K)).astype(float)
B = rng.integers(-3, 4, size=(L, K)).astype(float)
truth = A.T @ B

print("target C = A^T B, dimensions", truth.shape)
print()

setups = [
    (CodeChoice(Scheme.REPETITION, 2), 6),
    (CodeChoice(Scheme.MDS, 2), 6),
    (CodeChoice(Scheme.POLYNOMIAL, 2), 6),
    (CodeChoice(Scheme.MATDOT, 2), 6),
    (CodeChoice(Scheme.PRODUCT, 2), 9),
]

for choice, n in setups:
    tasks = encode(A, B, choice, n)
    k = recovery_threshold(choice, n)

    # drop workers greedily while the survivor set still decodes
    survivors = set(range(n))
    for w in rng.permutation(n).tolist():
        if decodable(choice, n, survivors - {w}):
            survivors.discard(w)

    results = [(w, worker_output(tasks, w)) for w in sorted(survivors)]
    c_hat = decode(tasks, results)
    err = np.linalg.norm(c_hat - truth) / np.linalg.norm(truth)

    left, right = tasks.worker_payloads[0]
    print(f"{choice.scheme.value:<11} N={n}  k={k}  "
          f"payload shapes {left.shape}x{right.shape}  "
          f"decoded from {sorted(survivors)}  rel err {err:.1e}")

print()
print("the product code decodes by peeling: rows and columns of the grid")
print("with enough known entries are re-solved until the corner completes")
