"""Erasure-coded task construction and decoding for distributed A^T B.

Five schemes are supported: repetition, MDS, polynomial, MatDot, and product
codes. All of them share the same worker contract: a worker receives a pair
of matrices (left, right) and returns left.T @ right. The schemes differ in
how A and B are partitioned and coded, how many results are needed to decode
(the recovery threshold), and how the decoder reassembles C = A^T B.

Codes are real-valued. MDS and product codes use a systematic generator
[I; V] where V is a Vandermonde block on distinct positive nodes, so the
first p codewords are the data blocks themselves and every square submatrix
of the generator is invertible. Polynomial and MatDot codes evaluate matrix
polynomials on points spread symmetrically inside (-1, 1) to keep the
interpolation systems well conditioned.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import (
    IllConditionedError,
    InfeasibleCodeError,
    NotEnoughResultsError,
    PartitionError,
)

# Decode refuses to solve systems above this condition number.
COND_LIMIT = 1e12


class Scheme(str, Enum):
    """Coding scheme identifier."""

    REPETITION = "repetition"
    MDS = "mds"
    POLYNOMIAL = "polynomial"
    MATDOT = "matdot"
    PRODUCT = "product"


@dataclass(frozen=True)
class CodeChoice:
    """A scheme plus its partition count p."""

    scheme: Scheme
    partitions: int


@dataclass(frozen=True)
class CodedTaskSet:
    """Per-worker payloads plus the metadata needed to decode.

    worker_payloads holds one (left, right) pair per active worker; worker w
    computes left.T @ right. Product codes only occupy the grid_side^2 grid
    workers, so the payload list can be shorter than cluster_size.
    eval_points holds interpolation points (polynomial, MatDot), parity
    nodes (MDS), or grid coordinates (product).
    """

    choice: CodeChoice
    cluster_size: int
    worker_payloads: tuple
    eval_points: tuple
    original_dims: tuple  # (K, L) for A in R^{L x K}
    right_cols: int  # M for B in R^{L x M}


def grid_side(n):
    """Side length of the largest square grid inside n workers."""
    return math.isqrt(n)


def is_square(n):
    """True iff n workers form an exact square grid."""
    return grid_side(n) ** 2 == n


def feasibility_issue(choice, n):
    """Return a human-readable constraint violation, or None if feasible."""
    p = choice.partitions
    if p < 2:
        return f"p={p} is below the minimum of 2"
    scheme = choice.scheme
    if scheme is Scheme.REPETITION:
        if n % p:
            return f"p={p} does not divide N={n}"
    elif scheme is Scheme.MDS:
        if p > n:
            return f"p={p} exceeds N={n}"
    elif scheme is Scheme.POLYNOMIAL:
        if p * p > n:
            return f"p^2={p * p} exceeds N={n}"
    elif scheme is Scheme.MATDOT:
        if 2 * p - 1 > n:
            return f"2p-1={2 * p - 1} exceeds N={n}"
    elif scheme is Scheme.PRODUCT:
        s = grid_side(n)
        if p > s:
            return f"p={p} exceeds the grid side {s} at N={n}"
    else:
        return f"unknown scheme {scheme!r}"
    k = _threshold(scheme, p, n)
    active = grid_side(n) ** 2 if scheme is Scheme.PRODUCT else n
    if k > active:
        return f"recovery threshold k={k} exceeds the {active} usable workers"
    return None


def feasible(choice, n):
    """True iff the (scheme, p) pair can run on an n-worker cluster."""
    return feasibility_issue(choice, n) is None


def _require_feasible(choice, n):
    issue = feasibility_issue(choice, n)
    if issue is not None:
        raise InfeasibleCodeError(
            f"{choice.scheme.value} with p={choice.partitions} at N={n}: {issue}"
        )


def _threshold(scheme, p, n):
    if scheme is Scheme.REPETITION:
        return n - n // p + 1
    if scheme is Scheme.MDS:
        return p
    if scheme is Scheme.POLYNOMIAL:
        return p * p
    if scheme is Scheme.MATDOT:
        return 2 * p - 1
    s = grid_side(n)
    return 2 * (p - 1) * s - (p - 1) ** 2 + 1


def recovery_threshold(choice, n):
    """Minimum result count that guarantees decodability (worst case)."""
    _require_feasible(choice, n)
    return _threshold(choice.scheme, choice.partitions, n)


def partition_columnwise(m, p):
    """Split m into p equal column blocks; hstack of the blocks recovers m."""
    m = np.asarray(m, dtype=float)
    if m.shape[1] % p:
        raise PartitionError(f"p={p} does not divide {m.shape[1]} columns")
    return np.hsplit(m, p)


def partition_rowwise(m, p):
    """Split m into p equal row blocks; vstack of the blocks recovers m."""
    m = np.asarray(m, dtype=float)
    if m.shape[0] % p:
        raise PartitionError(f"p={p} does not divide {m.shape[0]} rows")
    return np.vsplit(m, p)


def evaluation_points(n):
    """n distinct interpolation points, evenly spread and symmetric in (-1, 1).

    Raw points 1..n make Vandermonde systems unusable well before n=10, so
    the integers are rescaled by 2/(n+1) and centered.
    """
    return 2.0 * np.arange(1, n + 1) / (n + 1) - 1.0


def parity_nodes(q):
    """q distinct positive nodes in (0, 2) for the parity rows of a generator.

    Positivity matters: a Vandermonde block on distinct positive nodes keeps
    every square submatrix of [I; V] invertible, which symmetric point sets
    do not. With q=1 the node is exactly 1, so the single parity codeword is
    the plain sum of the data blocks.
    """
    return 2.0 * np.arange(1, q + 1) / (q + 1)


def systematic_generator(p, n):
    """(n, p) systematic MDS generator: identity on top, Vandermonde below."""
    if n < p:
        raise ValueError(f"cannot extend {p} blocks to {n} codewords")
    g = np.zeros((n, p))
    g[:p] = np.eye(p)
    if n > p:
        g[p:] = np.vander(parity_nodes(n - p), p, increasing=True)
    return g


def encode(a, b, choice, n):
    """Build the coded payloads for C = A^T B on an n-worker cluster."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.ndim != 2 or b.ndim != 2:
        raise ValueError("operands must be 2-d matrices")
    if a.shape[0] != b.shape[0]:
        raise ValueError(f"row mismatch: A has {a.shape[0]} rows, B has {b.shape[0]}")
    _require_feasible(choice, n)
    p = choice.partitions
    scheme = choice.scheme
    l_rows, k_cols = a.shape
    m_cols = b.shape[1]

    if scheme is Scheme.REPETITION:
        blocks = partition_columnwise(a, p)
        group = n // p
        payloads = tuple((blocks[w // group], b) for w in range(n))
        points = ()
    elif scheme is Scheme.MDS:
        blocks = np.stack(partition_columnwise(a, p))
        coded = np.tensordot(systematic_generator(p, n), blocks, axes=1)
        payloads = tuple((coded[w], b) for w in range(n))
        points = tuple(parity_nodes(n - p))
    elif scheme is Scheme.POLYNOMIAL:
        a_blocks = np.stack(partition_columnwise(a, p))
        b_blocks = np.stack(partition_columnwise(b, p))
        x = evaluation_points(n)
        # left carries exponents 0..p-1, right carries 0, p, .., (p-1)p
        left = np.tensordot(np.vander(x, p, increasing=True), a_blocks, axes=1)
        right = np.tensordot(np.vander(x**p, p, increasing=True), b_blocks, axes=1)
        payloads = tuple((left[w], right[w]) for w in range(n))
        points = tuple(x)
    elif scheme is Scheme.MATDOT:
        a_blocks = np.stack(partition_rowwise(a, p))
        b_blocks = np.stack(partition_rowwise(b, p))
        x = evaluation_points(n)
        # left exponents ascend 0..p-1, right exponents descend p-1..0, so
        # the x^{p-1} coefficient of the product collects sum_j A_j^T B_j
        left = np.tensordot(np.vander(x, p, increasing=True), a_blocks, axes=1)
        right = np.tensordot(np.vander(x, p), b_blocks, axes=1)
        payloads = tuple((left[w], right[w]) for w in range(n))
        points = tuple(x)
    else:
        s = grid_side(n)
        g = systematic_generator(p, s)
        coded_a = np.tensordot(g, np.stack(partition_columnwise(a, p)), axes=1)
        coded_b = np.tensordot(g, np.stack(partition_columnwise(b, p)), axes=1)
        payloads = tuple(
            (coded_a[i], coded_b[j]) for i in range(s) for j in range(s)
        )
        points = tuple((i, j) for i in range(s) for j in range(s))

    return CodedTaskSet(choice, n, payloads, points, (k_cols, l_rows), m_cols)


def worker_output(tasks, w):
    """What worker w returns: the cross product of its payload pair."""
    left, right = tasks.worker_payloads[w]
    return left.T @ right


def _peel_closure(grid, p):
    """Close (in place) each boolean s x s grid under row/column peeling.

    A row or column with at least p known entries determines its remaining
    entries. Rounds of simultaneous fills reach the same fixpoint as any
    sequential sweep order because the fill rule is monotone.
    """
    s = grid.shape[-1]
    while True:
        row_counts = grid.sum(axis=2)
        col_counts = grid.sum(axis=1)
        fill_rows = (row_counts >= p) & (row_counts < s)
        fill_cols = (col_counts >= p) & (col_counts < s)
        if not (fill_rows.any() or fill_cols.any()):
            return grid
        grid |= fill_rows[:, :, None]
        grid |= fill_cols[:, None, :]


def decodable(choice, n, pattern):
    """True iff the completed worker set can be decoded."""
    _require_feasible(choice, n)
    p = choice.partitions
    done = set(pattern)
    for w in done:
        if not 0 <= w < n:
            raise ValueError(f"worker index {w} outside 0..{n - 1}")
    scheme = choice.scheme
    if scheme is Scheme.REPETITION:
        group = n // p
        return len({w // group for w in done}) == p
    if scheme is Scheme.PRODUCT:
        s = grid_side(n)
        grid = np.zeros((1, s, s), dtype=bool)
        for w in done:
            if w < s * s:
                grid[0, w // s, w % s] = True
        closed = _peel_closure(grid, p)
        # the p x p systematic corner holds the data blocks
        return bool(closed[0, :p, :p].all())
    return len(done) >= _threshold(scheme, p, n)


@functools.lru_cache(maxsize=None)
def decodable_pattern_table(s, p):
    """Decodability of every completion bitmask on an s x s grid.

    Returns a read-only boolean array t with t[mask] telling whether the
    pattern whose bit w marks cell (w // s, w % s) peels to completion.
    Exhaustive over 2^(s^2) patterns, so s is capped at 4.
    """
    if s > 4:
        raise ValueError(f"exhaustive enumeration is limited to s <= 4, got {s}")
    if not 2 <= p <= s:
        raise InfeasibleCodeError(f"product code needs 2 <= p <= s, got p={p}, s={s}")
    n = s * s
    masks = np.arange(1 << n, dtype=np.uint32)
    cells = ((masks[:, None] >> np.arange(n, dtype=np.uint32)) & 1).astype(bool)
    closed = _peel_closure(cells.reshape(-1, s, s), p)
    ok = closed[:, :p, :p].all(axis=(1, 2))
    ok.flags.writeable = False
    return ok


@functools.lru_cache(maxsize=None)
def undecodable_size_counts(s, p):
    """Count the undecodable completion patterns of each size on an s x s grid.

    Returns a tuple u of length s^2 + 1 where u[m] is the number of m-cell
    subsets that peeling cannot complete.
    """
    ok = decodable_pattern_table(s, p)
    n = s * s
    masks = np.arange(1 << n, dtype=np.uint32)
    sizes = ((masks[:, None] >> np.arange(n, dtype=np.uint32)) & 1).sum(axis=1)
    counts = np.bincount(sizes[~ok], minlength=n + 1)
    return tuple(int(c) for c in counts)


def _check_condition(mat):
    cond = np.linalg.cond(mat)
    if not cond < COND_LIMIT:
        raise IllConditionedError(
            f"decode system condition number {cond:.3e} exceeds {COND_LIMIT:.0e}"
        )


def decode(tasks, results):
    """Recover C = A^T B from (worker index, output) pairs.

    Workers are consumed in ascending index order; threshold schemes use the
    first k results, repetition uses the first completer of each block, and
    product codes peel the grid one row or column solve at a time.
    """
    choice = tasks.choice
    p = choice.partitions
    k_cols, _ = tasks.original_dims
    m_cols = tasks.right_cols
    got = {}
    for w, out in results:
        if w in got:
            raise ValueError(f"duplicate result for worker {w}")
        got[w] = np.asarray(out, dtype=float)
    if not decodable(choice, tasks.cluster_size, got.keys()):
        raise NotEnoughResultsError(
            f"{choice.scheme.value} with p={p}: result set {sorted(got)} "
            "is not decodable"
        )
    scheme = choice.scheme

    if scheme is Scheme.REPETITION:
        group = tasks.cluster_size // p
        rows = [None] * p
        for w in sorted(got):
            if rows[w // group] is None:
                rows[w // group] = got[w]
        return np.vstack(rows)

    if scheme is Scheme.MDS:
        idx = sorted(got)[:p]
        gen = systematic_generator(p, tasks.cluster_size)[idx]
        _check_condition(gen)
        stacked = np.stack([got[w] for w in idx])
        blocks = np.linalg.solve(gen, stacked.reshape(p, -1))
        return blocks.reshape(k_cols, m_cols)

    if scheme is Scheme.POLYNOMIAL:
        k = p * p
        idx = sorted(got)[:k]
        x = np.asarray(tasks.eval_points)[idx]
        vand = np.vander(x, k, increasing=True)
        _check_condition(vand)
        stacked = np.stack([got[w] for w in idx])
        coeff = np.linalg.solve(vand, stacked.reshape(k, -1))
        kb, mb = k_cols // p, m_cols // p
        coeff = coeff.reshape(k, kb, mb)
        c = np.empty((k_cols, m_cols))
        for e in range(k):
            # coefficient of x^e is block (row j, column l) with e = j + l p
            j, l = e % p, e // p
            c[j * kb : (j + 1) * kb, l * mb : (l + 1) * mb] = coeff[e]
        return c

    if scheme is Scheme.MATDOT:
        k = 2 * p - 1
        idx = sorted(got)[:k]
        x = np.asarray(tasks.eval_points)[idx]
        vand = np.vander(x, k, increasing=True)
        _check_condition(vand)
        stacked = np.stack([got[w] for w in idx])
        coeff = np.linalg.solve(vand, stacked.reshape(k, -1))
        return coeff[p - 1].reshape(k_cols, m_cols)

    return _decode_product(tasks, got)


def _decode_product(tasks, got):
    p = tasks.choice.partitions
    s = grid_side(tasks.cluster_size)
    k_cols = tasks.original_dims[0]
    m_cols = tasks.right_cols
    kb, mb = k_cols // p, m_cols // p
    gen = systematic_generator(p, s)
    known = {}
    for w, out in got.items():
        if w < s * s:
            known[(w // s, w % s)] = out

    def solve_line(cells):
        # cells: p known (position on the line, block) pairs; returns all s
        pos = [q for q, _ in cells]
        sub = gen[pos]
        _check_condition(sub)
        stacked = np.stack([blk for _, blk in cells]).reshape(p, -1)
        symbols = np.linalg.solve(sub, stacked)
        return (gen @ symbols).reshape(s, kb, mb)

    changed = True
    while changed:
        changed = False
        for i in range(s):
            have = [j for j in range(s) if (i, j) in known]
            if p <= len(have) < s:
                line = solve_line([(j, known[(i, j)]) for j in have[:p]])
                for j in range(s):
                    known[(i, j)] = line[j]
                changed = True
        for j in range(s):
            have = [i for i in range(s) if (i, j) in known]
            if p <= len(have) < s:
                line = solve_line([(i, known[(i, j)]) for i in have[:p]])
                for i in range(s):
                    known[(i, j)] = line[i]
                changed = True

    c = np.empty((k_cols, m_cols))
    for a in range(p):
        for b in range(p):
            c[a * kb : (a + 1) * kb, b * mb : (b + 1) * mb] = known[(a, b)]
    return c
