"""Coset weights of bit-flip errors as Ising partition functions.

For an error ``E`` and gauge faces ``g_f`` the coset weight is
``sum_g P(E g)`` with ``P`` the i.i.d. flip measure at rate ``q``.  Writing
``P(E) = (q(1-q))^{n/2} prod_j exp(K eta_j)`` with ``eta_j = (-1)^{E_j}``
and ``exp(2K) = (1-q)/q`` turns the sum into an Ising partition function
with one spin per gauge face and one bond (or field) per qubit.  The spins
are eliminated column by column, so the live frontier stays near one
plaquette column.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .kernel import contract_batch
from .lattice import CodeLayout, faces_containing

OP_ADD, OP_BOND, OP_FIELD, OP_SUM, OP_CONST = range(5)


@dataclass(frozen=True)
class GaugeProgram:
    ops: np.ndarray
    width: int
    n: int
    n_spins: int


def other_kind(kind: str) -> str:
    return "X" if kind == "Z" else "Z"


def compile_program(layout: CodeLayout, gauge_kind: str = "X") -> GaugeProgram:
    """Elimination schedule for spins on the ``gauge_kind`` faces."""
    faces = layout.faces(gauge_kind)
    touching = faces_containing(layout, gauge_kind)
    order = sorted(range(len(faces)), key=lambda k: (faces[k].anchor[1], faces[k].anchor[0]))
    terms_of = [[] for _ in faces]
    ops = []
    for j, fs in enumerate(touching):
        if not fs:
            ops.append((OP_CONST, 0, 0, j))
        for f in fs:
            terms_of[f].append(j)
    remaining = [len(t) for t in terms_of]
    slot_of = {}
    free = []
    width = 0
    done = set()
    for f in order:
        slot = free.pop() if free else width
        if slot == width:
            width += 1
        slot_of[f] = slot
        ops.append((OP_ADD, slot, 0, -1))
        for j in terms_of[f]:
            if j in done or not all(g in slot_of for g in touching[j]):
                continue
            done.add(j)
            fs = touching[j]
            if len(fs) == 1:
                ops.append((OP_FIELD, slot_of[fs[0]], 0, j))
            else:
                ops.append((OP_BOND, slot_of[fs[0]], slot_of[fs[1]], j))
            for g in fs:
                remaining[g] -= 1
        for g in list(slot_of):
            if remaining[g] == 0:
                ops.append((OP_SUM, slot_of[g], 0, -1))
                free.append(slot_of.pop(g))
                free.sort(reverse=True)
    if slot_of:
        raise RuntimeError("elimination left live spins")
    arr = np.array([(o, a, b, max(q, 0)) for o, a, b, q in ops], dtype=np.int32)
    return GaugeProgram(arr, width, layout.n, len(faces))


def coupling(q: float) -> float:
    """Nishimori coupling ``K`` with ``exp(2K) = (1-q)/q``."""
    return 0.5 * np.log((1.0 - q) / q)


def log_partition(program: GaugeProgram, errors: np.ndarray, K: float, kernel=None) -> np.ndarray:
    """``log sum_s prod_j exp(K eta_j s s')`` for each row of ``errors``."""
    errors = np.atleast_2d(np.asarray(errors, dtype=np.uint8))
    eta = np.ascontiguousarray(1 - 2 * errors.astype(np.int8))
    fn = contract_batch if kernel is None else kernel
    return np.asarray(fn(np.ascontiguousarray(program.ops), eta, float(K), int(program.width)))


def log_coset_weights(program: GaugeProgram, errors: np.ndarray, q: float, kernel=None) -> np.ndarray:
    """Natural log of ``sum_g P_q(E g)`` for every row ``E`` of ``errors``."""
    if not 0.0 < q < 0.5:
        raise ValueError("coset weights need 0 < q < 1/2")
    lp = log_partition(program, errors, coupling(q), kernel)
    return lp + 0.5 * program.n * np.log(q * (1.0 - q))
