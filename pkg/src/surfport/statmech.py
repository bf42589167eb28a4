"""Renyi relative entropy between the two noisy logical states.

For independent X and Z flips at rate ``q`` per copy, the overlaps
``tr(rho_0^2)`` and ``tr(rho_0 rho_1)`` are the probabilities that the
composed flip pattern (rate ``p = 2q(1-q)``) lies in the trivial or the
logical coset; the Z part cancels in the ratio.  The ratio is therefore an
Ising partition-function ratio on the X-face lattice with uniform coupling
``tanh K = 1 - 2p``, fixed boundary spins on the left and right and a
flipped left boundary for the logical sector.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import gf2
from .clifford import CliffordCircuit, Gate, PauliString, build_prep_unitary, simulate
from .coset import compile_program, log_partition
from .lattice import build_layout

__all__ = [
    "IsingSpec",
    "PurityEstimate",
    "renyi_from_purities",
    "ising_relative_entropy",
    "ising_log_partitions",
    "simulate_bell_experiment",
    "dm_oracle_renyi",
    "dm_purities",
    "swap_value",
    "per_copy_rate",
]


@dataclass(frozen=True)
class IsingSpec:
    L: int
    K: float
    boundary: str = "fixed"

    def __post_init__(self):
        if self.K < 0:
            raise ValueError("coupling must be non-negative")
        if self.boundary not in ("fixed", "wall"):
            raise ValueError("boundary must be 'fixed' or 'wall'")


@dataclass(frozen=True)
class PurityEstimate:
    value: float
    stderr: float
    shots: int


def renyi_from_purities(tr00: float, tr01: float) -> float:
    if tr00 <= 0:
        raise ValueError("tr(rho_0^2) must be positive")
    if tr01 < 0:
        raise ValueError("overlap must be non-negative")
    if tr01 == 0:
        return math.inf
    return -math.log(tr01) + math.log(tr00)


def per_copy_rate(p: float) -> float:
    """Per-copy flip rate ``q`` with ``2 q (1 - q) = p``."""
    if not 0.0 <= p <= 0.5:
        raise ValueError("p must lie in [0, 1/2]")
    return (1.0 - math.sqrt(1.0 - 2.0 * p)) / 2.0


@lru_cache(maxsize=32)
def _ising_program(L: int):
    return compile_program(build_layout(L), "X")


def ising_log_partitions(spec_or_L, p: float | None = None):
    """``(log Z_fixed, log Z_wall)`` with coupling ``tanh K = 1 - 2p``."""
    L = spec_or_L.L if isinstance(spec_or_L, IsingSpec) else int(spec_or_L)
    if isinstance(spec_or_L, IsingSpec):
        K = spec_or_L.K
    else:
        if not 0.0 < p <= 0.5:
            raise ValueError("p must lie in (0, 1/2]")
        K = math.atanh(1.0 - 2.0 * p)
    layout = build_layout(L)
    prog = _ising_program(L)
    rows = np.zeros((2, layout.n), dtype=np.uint8)
    rows[1] = layout.logical_vector("X")
    lz = log_partition(prog, rows, K)
    return float(lz[0]), float(lz[1])


def ising_relative_entropy(L: int, p: float) -> float:
    """``-ln(Z_wall / Z_fixed)`` on the distance-``L`` lattice."""
    if L > 24:
        raise ValueError("transfer contraction is limited to L <= 24")
    if not 0.0 < p <= 0.5:
        raise ValueError("p must lie in (0, 1/2]")
    if p == 0.5:
        return 0.0
    fixed, wall = ising_log_partitions(L, p)
    return fixed - wall


def swap_value(x, z):
    """Eigenvalue of SWAP from the XX and ZZ Bell outcomes (each +-1)."""
    return (1 + x + z - x * z) / 2


@lru_cache(maxsize=16)
def _bell_outcome_space(d: int, orthogonal: bool):
    """Affine space of noiseless Bell-readout bits as (offset, generator rows).

    Qubit ``j`` of the first copy carries the XX parity of pair ``j`` and
    qubit ``n + j`` the ZZ parity; bit 0 means +1.
    """
    n = d * d
    prep = build_prep_unitary(d)
    circ = CliffordCircuit(2 * n)
    for layer in prep.layers:
        circ.append_layer([Gate(g.name, g.qubits) for g in layer]
                          + [Gate(g.name, tuple(q + n for q in g.qubits)) for g in layer])
    tab, _ = simulate(circ)
    if orthogonal:
        for q in build_layout(d).logical_x:
            tab.x(n + q)
    for j in range(n):
        tab.cnot(j, n + j)
    for j in range(n):
        tab.h(j)
    stabs = tab.stabilizers()
    xb = np.array([s.x for s in stabs], dtype=np.uint8)
    # combinations of generators with no X part pin the readout parities
    _, piv, t = gf2.row_reduce(xb)
    cons, rhs = [], []
    for comb in t[len(piv):]:
        acc = PauliString((0,) * (2 * n), (0,) * (2 * n))
        for r in np.nonzero(comb)[0]:
            acc = acc * stabs[r]
        cons.append(acc.z)
        rhs.append(0 if acc.sign > 0 else 1)
    cons = np.array(cons, dtype=np.uint8)
    offset = gf2.solve(cons, np.array(rhs, dtype=np.uint8))
    return offset, gf2.nullspace(cons)


def simulate_bell_experiment(d: int, q: float, pair_kind: str = "same", shots: int = 10000,
                             rng=None, batch: int = 200000) -> PurityEstimate:
    """Estimate ``tr(rho_0 rho_k)`` with per-pair Bell readout.

    Both copies receive independent X and Z flips at rate ``q`` per qubit.
    The flips are propagated as a Pauli frame through the CNOT+H readout.
    """
    if shots <= 0:
        raise ValueError("shots must be positive")
    if d > 5:
        raise ValueError("Bell simulation is limited to d <= 5")
    if pair_kind not in ("same", "orthogonal"):
        raise ValueError("pair_kind must be 'same' or 'orthogonal'")
    rng = np.random.default_rng() if rng is None else rng
    n = d * d
    offset, gens = _bell_outcome_space(d, pair_kind == "orthogonal")
    g = gens.astype(np.int64)
    total, total_sq, done = 0.0, 0.0, 0
    while done < shots:
        m = min(batch, shots - done)
        coeff = rng.integers(0, 2, size=(m, g.shape[0]), dtype=np.int64)
        bits = (coeff @ g % 2).astype(np.uint8) ^ offset[None, :]
        xa, za, xb, zb = (rng.random((4, m, n)) < q).astype(np.uint8)
        a_bits = bits[:, :n] ^ za ^ zb
        b_bits = bits[:, n:] ^ xa ^ xb
        x = 1 - 2 * a_bits.astype(np.int8)
        z = 1 - 2 * b_bits.astype(np.int8)
        v = np.prod(swap_value(x.astype(np.int64), z.astype(np.int64)), axis=1).astype(float)
        total += v.sum()
        total_sq += (v ** 2).sum()
        done += m
    mean = total / shots
    var = max(total_sq / shots - mean ** 2, 0.0)
    return PurityEstimate(float(mean), float(math.sqrt(var / shots)), int(shots))


def _apply_flip_channel(rho: np.ndarray, n: int, q: float, pauli: str) -> np.ndarray:
    shape = (2,) * (2 * n)
    r = rho.reshape(shape)
    for k in range(n):
        if pauli == "X":
            other = np.flip(np.flip(r, axis=k), axis=n + k)
        else:
            sgn = np.array([1.0, -1.0])
            other = r * sgn.reshape([2 if a == k else 1 for a in range(2 * n)])
            other = other * sgn.reshape([2 if a == n + k else 1 for a in range(2 * n)])
        r = (1 - q) * r + q * other
    return r.reshape(2 ** n, 2 ** n)


def dm_purities(d: int, q: float):
    """Exact ``(tr rho_0^2, tr rho_0 rho_1)`` with X and Z flips at rate ``q`` per qubit."""
    if d > 3:
        raise ValueError("density-matrix oracle is limited to d <= 3")
    from .oracle_sv import LogicalTarget, prepare_logical_state

    n = d * d
    out = []
    for thL in (0.0, math.pi):
        psi = prepare_logical_state(d, LogicalTarget(thL)).psi.ravel()
        rho = np.outer(psi, psi.conj())
        rho = _apply_flip_channel(rho, n, q, "X")
        rho = _apply_flip_channel(rho, n, q, "Z")
        out.append(rho)
    tr00 = float(np.real(np.vdot(out[0], out[0])))
    tr01 = float(np.real(np.vdot(out[0], out[1])))
    return tr00, tr01


def dm_oracle_renyi(d: int, p: float) -> float:
    """D_2 from dense density matrices, each copy flipped at ``q`` with 2q(1-q) = p."""
    return renyi_from_purities(*dm_purities(d, per_copy_rate(p)))
