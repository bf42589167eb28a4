"""Effective channels, error sampling, readout mitigation and noise estimators."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass

import numpy as np

from .lattice import CodeLayout

__all__ = [
    "EffectiveChannel",
    "ResponseMatrix",
    "ParityReport",
    "effective_entangling",
    "syndrome_flip_rate",
    "effective_channel",
    "sample_error",
    "parity_expectation",
    "estimate_noise_from_parities",
    "fit_linear_noise",
    "max_distance",
    "mitigate_readout",
    "inject_classical_errors",
    "combined_rate",
    "load_response_matrices",
    "rng_stream",
]

HALF_PI = math.pi / 2
QUARTER_PI = math.pi / 4


def rng_stream(seed: int, *key: int) -> np.random.Generator:
    """Independent Philox stream for (seed, key...), stable under any schedule."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))


def _basis(theta: float) -> str:
    if math.isclose(theta, HALF_PI, abs_tol=1e-9):
        return "half"
    if math.isclose(theta, QUARTER_PI, abs_tol=1e-9):
        return "quarter"
    raise ValueError("theta must be pi/2 or pi/4")


@dataclass(frozen=True)
class EffectiveChannel:
    theta: float
    t_eff: float
    q: float


def effective_entangling(theta: float, t: float, p: float) -> float:
    """Single detuning ``t_eff`` that folds incoherent flips ``p`` into ``t``."""
    which = _basis(theta)
    if not (0.0 <= t <= QUARTER_PI + 1e-12 and 0.0 <= p <= 0.5):
        raise ValueError("need 0 <= t <= pi/4 and 0 <= p <= 1/2")
    s = math.sin(t) ** 2
    c2 = math.cos(2 * t)
    val = s + p * c2 if which == "half" else s + p * (1.0 + c2)
    if val < -1e-15 or val > 1.0 + 1e-15:
        raise ValueError("effective entangling expression outside [0, 1]")
    val = min(max(val, 0.0), 1.0)
    t_eff = math.asin(math.sqrt(val))
    if which == "half":
        t_eff = min(t_eff, QUARTER_PI)
    return t_eff


def syndrome_flip_rate(theta: float, t_eff: float) -> float:
    """Per-qubit flip rate seen by a Z-basis decoder."""
    which = _basis(theta)
    s = math.sin(t_eff) ** 2
    return s if which == "half" else s / 2.0


def effective_channel(theta: float, t: float, p: float) -> EffectiveChannel:
    te = effective_entangling(theta, t, p)
    return EffectiveChannel(theta, te, syndrome_flip_rate(theta, te))


def sample_error(layout: CodeLayout, q: float, rng, shots: int | None = None) -> np.ndarray:
    """I.i.d. flips at rate ``q``; shape ``(n,)`` or ``(shots, n)``."""
    if not 0.0 <= q <= 0.5:
        raise ValueError("q must lie in [0, 1/2]")
    shape = (layout.n,) if shots is None else (shots, layout.n)
    return (rng.random(shape) < q).astype(np.uint8)


def parity_expectation(p: float, w: int) -> float:
    if w not in (2, 4):
        raise ValueError("face weight must be 2 or 4")
    return (1.0 - 2.0 * p) ** w


@dataclass
class ParityReport:
    """Per-face parity expectations with their weights."""

    values: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        self.weights = np.asarray(self.weights, dtype=int)
        if self.values.shape != self.weights.shape:
            raise ValueError("values and weights differ in length")
        if np.any(np.abs(self.values) > 1 + 1e-12):
            raise ValueError("parities must lie in [-1, 1]")

    def mean_parity(self) -> float:
        """Average with weight-2 values squared, so every term scales as (1-2p)^4."""
        v = np.where(self.weights == 2, self.values ** 2, self.values)
        return float(v.mean())


def estimate_noise_from_parities(report: ParityReport) -> float:
    if not (np.any(report.weights == 2) and np.any(report.weights == 4)):
        raise ValueError("need at least one face of weight 2 and one of weight 4")
    m = report.mean_parity()
    if m < 0:
        raise ValueError("mean parity is negative; parities are inconsistent")
    return (1.0 - m ** 0.25) / 2.0


def fit_linear_noise(d_list, p_list):
    """Least squares for ``p(d) = a (d + d0)``; returns ``(a, d0)``."""
    d = np.asarray(d_list, dtype=float)
    p = np.asarray(p_list, dtype=float)
    if d.size < 2 or np.ptp(d) == 0:
        raise ValueError("need at least two distinct distances")
    a, b = np.polyfit(d, p, 1)
    return float(a), float(b / a)


def max_distance(a: float, d0: float, p_c: float) -> int:
    return int(math.floor(p_c / a - d0))


@dataclass(frozen=True)
class ResponseMatrix:
    """Column-stochastic 2x2 readout matrix: M[observed, prepared]."""

    m: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.m, dtype=float)
        if m.shape != (2, 2):
            raise ValueError("response matrix must be 2x2")
        if np.any(m < -1e-12) or np.any(m > 1 + 1e-12) or not np.allclose(m.sum(axis=0), 1.0):
            raise ValueError("response matrix must be column stochastic")
        object.__setattr__(self, "m", m)

    @classmethod
    def from_errors(cls, e01: float, e10: float) -> "ResponseMatrix":
        """``e01`` = P(read 1 | prepared 0), ``e10`` = P(read 0 | prepared 1)."""
        return cls(np.array([[1 - e01, e10], [e01, 1 - e10]]))

    def inverse(self) -> np.ndarray:
        if abs(np.linalg.det(self.m)) < 1e-12:
            raise ValueError("response matrix is singular")
        return np.linalg.inv(self.m)


def mitigate_readout(face_marginal_counts, matrices, tol: float = 0.05) -> float:
    """Parity of a face after undoing tensor-product readout errors.

    ``face_marginal_counts`` has ``2**k`` entries indexed by the outcome
    bits of the face's qubits, first qubit most significant.
    """
    counts = np.asarray(face_marginal_counts, dtype=float).ravel()
    k = len(matrices)
    if counts.size != 2 ** k:
        raise ValueError("counts length must be 2**(number of matrices)")
    if k > 4:
        raise ValueError("faces have at most four qubits")
    probs = counts / counts.sum()
    inv = np.array([[1.0]])
    for mat in matrices:
        m = mat if isinstance(mat, ResponseMatrix) else ResponseMatrix(mat)
        inv = np.kron(inv, m.inverse())
    corrected = inv @ probs
    if np.any(corrected < -tol) or np.any(corrected > 1 + tol):
        raise ValueError("mitigated probabilities fall outside [0, 1]")
    idx = np.arange(2 ** k)
    signs = np.array([(-1) ** bin(i).count("1") for i in idx], dtype=float)
    return float(signs @ corrected)


def inject_classical_errors(bitstrings, p_flip: float, rng) -> np.ndarray:
    if not 0.0 <= p_flip <= 0.5:
        raise ValueError("p_flip must lie in [0, 1/2]")
    b = np.asarray(bitstrings, dtype=np.uint8)
    return b ^ (rng.random(b.shape) < p_flip).astype(np.uint8)


def combined_rate(p0: float, p_flip: float) -> float:
    return (1.0 - p0) * p_flip + (1.0 - p_flip) * p0


def load_response_matrices(text: str, fmt: str = "json") -> dict:
    """Parse a calibration file into ``{qubit: ResponseMatrix}``.

    JSON: a list of objects with ``qubit`` and ``m`` (2x2 nested list).
    CSV: columns ``qubit,m00,m01,m10,m11``.
    """
    out = {}
    if fmt == "json":
        for row in json.loads(text):
            out[int(row["qubit"])] = ResponseMatrix(np.array(row["m"], dtype=float))
    elif fmt == "csv":
        for row in csv.DictReader(io.StringIO(text)):
            m = np.array([[row["m00"], row["m01"]], [row["m10"], row["m11"]]], dtype=float)
            out[int(row["qubit"])] = ResponseMatrix(m)
    else:
        raise ValueError("format must be json or csv")
    return out
