"""Matching and coset-likelihood decoders for single-round bit-flip noise.

``kind`` names the check type: with ``kind='Z'`` (the default) the input is
a Z-face syndrome of X flips, the gauge group is generated by the X-faces,
and the decoded bit is the parity on the Z logical.  ``kind='X'`` swaps
every role, for X-basis readout.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.sparse.csgraph import shortest_path

from . import gf2
from .coset import compile_program, log_coset_weights, other_kind
from .lattice import CodeLayout, build_layout, logical_parity, syndrome_of

__all__ = [
    "DecodeResult",
    "DefectGraph",
    "CosetDecoder",
    "MatchingDecoder",
    "decode_mwpm",
    "decode_coset_ml",
    "brute_force_coset",
    "decode_shot",
    "decode_bitstrings",
    "get_decoder",
]


@dataclass
class DecodeResult:
    correction: np.ndarray
    logical_flip: int
    log_likelihoods: tuple | None = None


@lru_cache(maxsize=64)
def _lift(distance: int, kind: str) -> np.ndarray:
    return gf2.right_inverse(build_layout(distance).check_matrix(kind))


@lru_cache(maxsize=64)
def _program(distance: int, gauge_kind: str):
    return compile_program(build_layout(distance), gauge_kind)


def reference_errors(layout: CodeLayout, syndromes: np.ndarray, kind: str = "Z") -> np.ndarray:
    """A fixed error consistent with each syndrome (GF(2) lift)."""
    s = np.atleast_2d(np.asarray(syndromes, dtype=np.int64))
    lift = _lift(layout.distance, kind).astype(np.int64)
    return (s @ lift.T % 2).astype(np.uint8)


class CosetDecoder:
    """Maximum-likelihood decoder comparing the two logical coset weights."""

    def __init__(self, layout: CodeLayout, q: float, kind: str = "Z", kernel=None):
        if not 0.0 < q < 0.5:
            raise ValueError("coset decoding needs 0 < q < 1/2")
        self.layout = layout
        self.q = float(q)
        self.kind = kind
        self.kernel = kernel
        self.program = _program(layout.distance, other_kind(kind))
        self.flip_support = layout.logical_vector(other_kind(kind))

    def coset_log_weights(self, references: np.ndarray):
        refs = np.atleast_2d(np.asarray(references, dtype=np.uint8))
        both = np.concatenate([refs, refs ^ self.flip_support[None, :]])
        lw = log_coset_weights(self.program, both, self.q, self.kernel)
        return lw[: len(refs)], lw[len(refs):]

    def decode_batch(self, syndromes: np.ndarray):
        """Return (corrections, logical_flips, L0, L1) for a batch of syndromes."""
        refs = reference_errors(self.layout, syndromes, self.kind)
        l0, l1 = self.coset_log_weights(refs)
        pick = l1 > l0
        corr = refs ^ (pick[:, None].astype(np.uint8) * self.flip_support[None, :])
        flips = logical_parity(self.layout, corr, self.kind)
        return corr, np.atleast_1d(flips), l0, l1


class MatchingDecoder:
    """Minimum-weight perfect matching via PyMatching.

    Under i.i.d. flips every edge has the same weight, so the matching does
    not depend on ``q``.
    """

    def __init__(self, layout: CodeLayout, q: float | None = None, kind: str = "Z"):
        import pymatching

        self.layout = layout
        self.kind = kind
        self.q = q
        self.matching = pymatching.Matching.from_check_matrix(layout.check_matrix(kind))

    def decode_batch(self, syndromes: np.ndarray):
        s = np.atleast_2d(np.asarray(syndromes, dtype=np.uint8))
        corr = self.matching.decode_batch(s).astype(np.uint8)
        flips = logical_parity(self.layout, corr, self.kind)
        return corr, np.atleast_1d(flips), None, None


def get_decoder(layout: CodeLayout, q: float, kind: str = "Z", decoder: str = "ml"):
    if decoder == "ml":
        return CosetDecoder(layout, q, kind)
    if decoder == "mwpm":
        return MatchingDecoder(layout, q, kind)
    raise ValueError(f"unknown decoder {decoder!r}")


def decode_mwpm(layout: CodeLayout, syndrome, q: float | None = None, kind: str = "Z") -> DecodeResult:
    corr, flips, _, _ = MatchingDecoder(layout, q, kind).decode_batch(syndrome)
    return DecodeResult(corr[0], int(flips[0]))


def decode_coset_ml(layout: CodeLayout, syndrome_or_reference, q: float, kind: str = "Z") -> DecodeResult:
    """ML decode one shot given either a syndrome or any consistent error."""
    v = np.asarray(syndrome_or_reference, dtype=np.uint8)
    dec = CosetDecoder(layout, q, kind)
    if v.shape[-1] == layout.n:
        ref = v[None, :]
    elif v.shape[-1] == len(layout.faces(kind)):
        ref = reference_errors(layout, v, kind)
    else:
        raise ValueError("input matches neither the syndrome nor the qubit count")
    l0, l1 = dec.coset_log_weights(ref)
    corr = ref[0] ^ (dec.flip_support if l1[0] > l0[0] else 0)
    return DecodeResult(corr.astype(np.uint8), int(logical_parity(layout, corr, kind)), (float(l0[0]), float(l1[0])))


def brute_force_coset(layout: CodeLayout, reference_error, q: float, kind: str = "Z"):
    """Enumerate the gauge group to get (W0, W1) directly; d <= 4 only."""
    if layout.distance > 4:
        raise ValueError("brute-force enumeration is limited to d <= 4")
    gauge = layout.check_matrix(other_kind(kind)).astype(np.int64)
    flip = layout.logical_vector(other_kind(kind))
    ref = np.asarray(reference_error, dtype=np.uint8)
    n = layout.n
    combos = np.array(list(itertools.product([0, 1], repeat=gauge.shape[0])), dtype=np.int64)
    elements = (combos @ gauge % 2).astype(np.uint8)
    out = []
    for base in (ref, ref ^ flip):
        w = (elements ^ base[None, :]).sum(axis=1)
        out.append(float(np.sum(q ** w * (1.0 - q) ** (n - w))))
    return tuple(out)


class DefectGraph:
    """Shortest error-chain lengths between checks and to the boundary.

    Nodes are the checks of one type plus a single boundary node; each qubit
    is an edge between the (one or two) checks it touches.
    """

    def __init__(self, layout: CodeLayout, kind: str = "Z"):
        h = layout.check_matrix(kind)
        m = h.shape[0]
        adj = np.zeros((m + 1, m + 1))
        for j in range(layout.n):
            rows = np.nonzero(h[:, j])[0]
            a, b = (rows[0], rows[1]) if len(rows) == 2 else (rows[0], m)
            adj[a, b] = adj[b, a] = 1
        self.n_checks = m
        self.distance = shortest_path(adj, method="D", unweighted=True).astype(int)

    def boundary_distance(self, node: int) -> int:
        return int(self.distance[node, self.n_checks])

    def min_matching_weight(self, defects) -> int:
        """Exact minimum total chain length pairing defects among themselves or to the boundary."""
        defects = list(defects)
        k = len(defects)
        if k > 16:
            raise ValueError("exhaustive pairing is limited to 16 defects")
        full = (1 << k) - 1
        best = [0] + [None] * full
        for mask in range(1, full + 1):
            i = (mask & -mask).bit_length() - 1
            rest = mask & ~(1 << i)
            cand = best[rest] + self.boundary_distance(defects[i])
            r = rest
            while r:
                jbit = r & -r
                j = jbit.bit_length() - 1
                c = best[rest & ~jbit] + int(self.distance[defects[i], defects[j]])
                if c < cand:
                    cand = c
                r &= r - 1
            best[mask] = cand
        return best[full]


def decode_bitstrings(layout: CodeLayout, bits, q: float, decoder: str = "ml", kind: str = "Z"):
    """Decode readout bitstrings of shape (shots, n).

    Returns a dict of arrays: syndrome weight, raw logical bit, decoder flip,
    corrected bit and (ML only) the coset log-weights.
    """
    b = np.atleast_2d(np.asarray(bits, dtype=np.uint8))
    if b.shape[1] != layout.n:
        raise ValueError(f"bitstrings must have length {layout.n}")
    synd = syndrome_of(layout, b, kind)
    raw = np.atleast_1d(logical_parity(layout, b, kind))
    qq = min(max(q, 1e-12), 0.5 - 1e-12)
    corr, flips, l0, l1 = get_decoder(layout, qq, kind, decoder).decode_batch(synd)
    nan = np.full(len(b), np.nan)
    return {
        "syndrome_weight": synd.sum(axis=1),
        "raw": raw,
        "logical_flip": flips.astype(np.uint8),
        "corrected_bit": (raw ^ flips).astype(np.uint8),
        "L0": nan if l0 is None else l0,
        "L1": nan if l1 is None else l1,
        "correction": corr,
    }


def decode_shot(layout: CodeLayout, bitstring, q: float, decoder: str = "ml", kind: str = "Z") -> int:
    b = np.asarray(bitstring, dtype=np.uint8)
    if b.ndim != 1 or b.shape[0] != layout.n:
        raise ValueError(f"bitstring must have length {layout.n}")
    return int(decode_bitstrings(layout, b[None, :], q, decoder, kind)["corrected_bit"][0])
