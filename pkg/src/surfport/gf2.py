"""Small dense linear algebra over GF(2) on uint8 arrays."""

from __future__ import annotations

import numpy as np


def row_reduce(a: np.ndarray):
    """Return (reduced copy, pivot columns, row transform T) with T @ a = reduced."""
    m = (np.asarray(a, dtype=np.uint8) & 1).copy()
    rows, cols = m.shape
    t = np.eye(rows, dtype=np.uint8)
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        hits = np.nonzero(m[r:, c])[0]
        if hits.size == 0:
            continue
        p = r + hits[0]
        if p != r:
            m[[r, p]] = m[[p, r]]
            t[[r, p]] = t[[p, r]]
        others = np.nonzero(m[:, c])[0]
        others = others[others != r]
        if others.size:
            m[others] ^= m[r]
            t[others] ^= t[r]
        pivots.append(c)
        r += 1
    return m, pivots, t


def rank(a: np.ndarray) -> int:
    return len(row_reduce(a)[1])


def right_inverse(h: np.ndarray) -> np.ndarray:
    """Matrix R (n x m) with h @ R = I for a full-row-rank h (m x n)."""
    h = np.asarray(h, dtype=np.uint8)
    m, n = h.shape
    red, piv, t = row_reduce(h)
    if len(piv) != m:
        raise ValueError("matrix does not have full row rank")
    r = np.zeros((n, m), dtype=np.uint8)
    # red = t @ h has identity on pivot columns, so choosing x supported on
    # the pivots gives h @ x = t^-1 @ (red @ x); solve with x_piv = t @ s.
    r[piv, :] = t[: len(piv)]
    return r


def nullspace(a: np.ndarray) -> np.ndarray:
    """Basis (rows) of {x : a @ x = 0}."""
    a = np.asarray(a, dtype=np.uint8)
    n = a.shape[1]
    red, piv, _ = row_reduce(a)
    free = [c for c in range(n) if c not in set(piv)]
    basis = np.zeros((len(free), n), dtype=np.uint8)
    for k, f in enumerate(free):
        basis[k, f] = 1
        for r, p in enumerate(piv):
            if red[r, f]:
                basis[k, p] = 1
    return basis


def solve(a: np.ndarray, b: np.ndarray):
    """One solution x of a @ x = b, or None if inconsistent."""
    a = np.asarray(a, dtype=np.uint8)
    b = np.asarray(b, dtype=np.uint8).reshape(-1, 1)
    aug = np.concatenate([a, b], axis=1)
    red, piv, _ = row_reduce(aug)
    n = a.shape[1]
    if n in piv:
        return None
    x = np.zeros(n, dtype=np.uint8)
    for r, p in enumerate(piv):
        x[p] = red[r, n]
    return x
