"""Bit-packed stabilizer tableau, layered Clifford circuits and encoders.

The tableau keeps ``n`` destabilizer rows followed by ``n`` stabilizer rows.
Each row packs its X and Z bits into 64-bit words, so every gate is a handful
of vectorised word operations over all rows at once.  Pauli rows are stored
Hermitian: ``(-1)^r i^{x.z} X^x Z^z``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import gf2
from .lattice import CodeLayout, build_layout

__all__ = [
    "PauliString",
    "Tableau",
    "Gate",
    "CliffordCircuit",
    "PauliFrame",
    "simulate",
    "build_prep_unitary",
    "build_prep_dual",
    "build_prep_measurement",
    "target_group",
    "cnot_schedule",
]

_ONE = np.uint64(1)


def _words(n: int) -> int:
    return max(1, (n + 63) // 64)


def _pack(bits: np.ndarray) -> np.ndarray:
    bits = np.asarray(bits, dtype=np.uint8)
    n = bits.shape[-1]
    w = _words(n)
    padded = np.zeros(bits.shape[:-1] + (w * 64,), dtype=np.uint8)
    padded[..., :n] = bits
    little = np.packbits(padded.reshape(bits.shape[:-1] + (w, 64)), axis=-1, bitorder="little")
    return little.view(np.uint64).reshape(bits.shape[:-1] + (w,))


def _unpack(words: np.ndarray, n: int) -> np.ndarray:
    raw = np.ascontiguousarray(words).view(np.uint8)
    bits = np.unpackbits(raw.reshape(words.shape[:-1] + (-1,)), axis=-1, bitorder="little")
    return bits[..., :n]


def _popcount(a: np.ndarray) -> np.ndarray:
    return np.bitwise_count(a).sum(axis=-1, dtype=np.int64)


@dataclass(frozen=True)
class PauliString:
    """Hermitian Pauli operator ``sign * P_1 ... P_n``."""

    x: tuple
    z: tuple
    sign: int = 1

    @classmethod
    def from_str(cls, text: str) -> "PauliString":
        sign = 1
        if text[0] in "+-":
            sign = -1 if text[0] == "-" else 1
            text = text[1:]
        x = tuple(int(c in "XY") for c in text)
        z = tuple(int(c in "ZY") for c in text)
        return cls(x, z, sign)

    @classmethod
    def from_support(cls, kind: str, support, n: int, sign: int = 1) -> "PauliString":
        bits = [0] * n
        for q in support:
            bits[q] = 1
        zero = (0,) * n
        if kind == "X":
            return cls(tuple(bits), zero, sign)
        if kind == "Z":
            return cls(zero, tuple(bits), sign)
        if kind == "Y":
            return cls(tuple(bits), tuple(bits), sign)
        raise ValueError(kind)

    @property
    def n(self) -> int:
        return len(self.x)

    def __str__(self) -> str:
        chars = "IXZY"
        body = "".join(chars[a + 2 * b] for a, b in zip(self.x, self.z))
        return ("+" if self.sign > 0 else "-") + body

    def commutes_with(self, other: "PauliString") -> bool:
        s = sum(a & d for a, d in zip(self.x, other.z)) + sum(b & c for b, c in zip(self.z, other.x))
        return s % 2 == 0

    def __mul__(self, other: "PauliString") -> "PauliString":
        if not self.commutes_with(other):
            raise ValueError("product of anticommuting Paulis is not Hermitian")
        x1, z1, x2, z2 = map(np.array, (self.x, self.z, other.x, other.z))
        x3, z3 = x1 ^ x2, z1 ^ z2
        e = (int((x1 & z1).sum()) + int((x2 & z2).sum()) - int((x3 & z3).sum())
             + 2 * int((z1 & x2).sum())) % 4
        sign = self.sign * other.sign * (1 if e == 0 else -1)
        return PauliString(tuple(int(v) for v in x3), tuple(int(v) for v in z3), sign)


class Tableau:
    """Stabilizer state on ``n`` qubits (CHP layout, bit-packed rows)."""

    def __init__(self, n: int, xs: np.ndarray, zs: np.ndarray, r: np.ndarray):
        self.n = n
        self.xs = xs
        self.zs = zs
        self.r = r

    @classmethod
    def zero_state(cls, n: int) -> "Tableau":
        eye = np.eye(n, dtype=np.uint8)
        zero = np.zeros((n, n), dtype=np.uint8)
        xs = _pack(np.concatenate([eye, zero]))
        zs = _pack(np.concatenate([zero, eye]))
        return cls(n, xs, zs, np.zeros(2 * n, dtype=np.uint8))

    def copy(self) -> "Tableau":
        return Tableau(self.n, self.xs.copy(), self.zs.copy(), self.r.copy())

    def _col(self, arr, q):
        return (arr[:, q >> 6] >> np.uint64(q & 63)) & _ONE

    # -- gates -----------------------------------------------------------
    def h(self, q: int):
        w, m = q >> 6, _ONE << np.uint64(q & 63)
        xa, za = self.xs[:, w] & m, self.zs[:, w] & m
        self.r ^= ((xa & za) != 0).astype(np.uint8)
        self.xs[:, w] ^= xa ^ za
        self.zs[:, w] ^= xa ^ za

    def s(self, q: int):
        w, m = q >> 6, _ONE << np.uint64(q & 63)
        xa, za = self.xs[:, w] & m, self.zs[:, w] & m
        self.r ^= ((xa & za) != 0).astype(np.uint8)
        self.zs[:, w] ^= xa

    def x(self, q: int):
        self.r ^= self._col(self.zs, q).astype(np.uint8)

    def z(self, q: int):
        self.r ^= self._col(self.xs, q).astype(np.uint8)

    def cnot(self, c: int, t: int):
        if c == t:
            raise ValueError("CNOT needs distinct qubits")
        xc, zc = self._col(self.xs, c), self._col(self.zs, c)
        xt, zt = self._col(self.xs, t), self._col(self.zs, t)
        self.r ^= (xc & zt & (xt ^ zc ^ _ONE)).astype(np.uint8)
        self.xs[:, t >> 6] ^= xc << np.uint64(t & 63)
        self.zs[:, c >> 6] ^= zt << np.uint64(c & 63)

    def swap(self, a: int, b: int):
        self.cnot(a, b)
        self.cnot(b, a)
        self.cnot(a, b)

    def apply_pauli(self, p: PauliString):
        """Conjugate the state by a Pauli (flips signs of anticommuting rows)."""
        px, pz = _pack(np.array(p.x)), _pack(np.array(p.z))
        anti = (_popcount(self.xs & pz) + _popcount(self.zs & px)) & 1
        self.r ^= anti.astype(np.uint8)

    # -- row algebra -----------------------------------------------------
    def _phase_exp(self, x1, z1, r1, x2, z2, r2):
        x3, z3 = x1 ^ x2, z1 ^ z2
        e = (2 * r1.astype(np.int64) + 2 * r2.astype(np.int64) + _popcount(x1 & z1)
             + _popcount(x2 & z2) - _popcount(x3 & z3) + 2 * _popcount(z1 & x2)) % 4
        return x3, z3, e

    def _rowsum(self, targets: np.ndarray, src: int):
        if targets.size == 0:
            return
        x3, z3, e = self._phase_exp(self.xs[src][None], self.zs[src][None], self.r[src:src + 1],
                                    self.xs[targets], self.zs[targets], self.r[targets])
        self.xs[targets], self.zs[targets] = x3, z3
        self.r[targets] = (e >> 1).astype(np.uint8)

    def _pauli_words(self, p: PauliString):
        if p.n != self.n:
            raise ValueError("Pauli length does not match tableau")
        return _pack(np.array(p.x)), _pack(np.array(p.z))

    def _anticommuting_rows(self, px, pz) -> np.ndarray:
        return ((_popcount(self.xs & pz) + _popcount(self.zs & px)) & 1).astype(bool)

    def expectation(self, p: PauliString) -> int:
        """Return +1/-1 if +-p is in the stabilizer group, else 0."""
        px, pz = self._pauli_words(p)
        anti = self._anticommuting_rows(px, pz)
        if anti[self.n:].any():
            return 0
        rows = np.nonzero(anti[: self.n])[0] + self.n
        acc_x = np.zeros_like(px)
        acc_z = np.zeros_like(pz)
        acc_r = np.zeros(1, dtype=np.uint8)
        for row in rows:
            acc_x, acc_z, e = self._phase_exp(acc_x[None], acc_z[None], acc_r,
                                              self.xs[row][None], self.zs[row][None], self.r[row:row + 1])
            acc_x, acc_z, acc_r = acc_x[0], acc_z[0], (e >> 1).astype(np.uint8)
        if not (np.array_equal(acc_x, px) and np.array_equal(acc_z, pz)):
            raise AssertionError("tableau is inconsistent")
        sign = -1 if acc_r[0] else 1
        return sign * p.sign

    def measure_pauli(self, p: PauliString, rng=None, forced: int | None = None):
        """Projectively measure ``p``; returns (bit, was_random).  bit 1 means -1."""
        px, pz = self._pauli_words(p)
        anti = self._anticommuting_rows(px, pz)
        stab_hits = np.nonzero(anti[self.n:])[0] + self.n
        if stab_hits.size == 0:
            val = self.expectation(p)
            return (0 if val > 0 else 1), False
        piv = int(stab_hits[0])
        others = np.nonzero(anti)[0]
        others = others[others != piv]
        self._rowsum(others, piv)
        dst = piv - self.n
        self.xs[dst], self.zs[dst], self.r[dst] = self.xs[piv], self.zs[piv], self.r[piv]
        if forced is None:
            rng = np.random.default_rng() if rng is None else rng
            bit = int(rng.integers(2))
        else:
            bit = int(forced)
        self.xs[piv], self.zs[piv] = px, pz
        self.r[piv] = bit ^ (1 if p.sign < 0 else 0)
        return bit, True

    def measure_z(self, q: int, rng=None, forced: int | None = None):
        return self.measure_pauli(PauliString.from_support("Z", [q], self.n), rng, forced)

    # -- inspection ------------------------------------------------------
    def stabilizers(self) -> list:
        xb = _unpack(self.xs[self.n:], self.n)
        zb = _unpack(self.zs[self.n:], self.n)
        return [PauliString(tuple(int(v) for v in xb[i]), tuple(int(v) for v in zb[i]),
                            -1 if self.r[self.n + i] else 1) for i in range(self.n)]

    def bits(self, rows: slice = slice(None)):
        return _unpack(self.xs[rows], self.n), _unpack(self.zs[rows], self.n)

    def is_valid(self) -> bool:
        """Stabilizers commute, destabilizers pair with them and all rows are independent."""
        xb, zb = self.bits()
        sym = (xb.astype(np.int64) @ zb.T.astype(np.int64) + zb.astype(np.int64) @ xb.T.astype(np.int64)) % 2
        n = self.n
        want = np.zeros((2 * n, 2 * n), dtype=np.int64)
        want[:n, n:] = np.eye(n, dtype=np.int64)
        want[n:, :n] = np.eye(n, dtype=np.int64)
        if not np.array_equal(sym[n:, n:], want[n:, n:]):
            return False
        if not np.array_equal(sym[:n, n:], want[:n, n:]):
            return False
        full = np.concatenate([xb, zb], axis=1)
        return gf2.rank(full) == 2 * n

    def group_equals(self, generators) -> bool:
        """True if the stabilizer group equals the group generated by ``generators`` (all +1)."""
        gens = list(generators)
        mat = np.array([list(g.x) + list(g.z) for g in gens], dtype=np.uint8)
        if gf2.rank(mat) != self.n:
            return False
        return all(self.expectation(g) == 1 for g in gens)


@dataclass(frozen=True)
class Gate:
    name: str
    qubits: tuple

    def __str__(self) -> str:
        return " ".join([self.name] + [str(q) for q in self.qubits])


_ARITY = {"H": 1, "X": 1, "Z": 1, "S": 1, "CNOT": 2, "SWAP": 2, "MZ": 1}


@dataclass
class CliffordCircuit:
    n: int
    layers: list = field(default_factory=list)

    def __post_init__(self):
        self.layers = [list(layer) for layer in self.layers]
        for layer in self.layers:
            self._check_layer(layer)

    def _check_layer(self, layer):
        seen = set()
        for g in layer:
            if g.name not in _ARITY or len(g.qubits) != _ARITY[g.name]:
                raise ValueError(f"bad gate {g}")
            for q in g.qubits:
                if not 0 <= q < self.n:
                    raise ValueError(f"qubit {q} out of range in {g}")
                if q in seen:
                    raise ValueError(f"gates overlap on qubit {q} within one layer")
                seen.add(q)

    def append_layer(self, gates):
        layer = list(gates)
        self._check_layer(layer)
        self.layers.append(layer)

    def two_qubit_depth(self) -> int:
        return sum(1 for layer in self.layers if any(_ARITY[g.name] == 2 for g in layer))

    def to_text(self) -> str:
        lines = [f"# qubits {self.n}"]
        for layer in self.layers:
            lines.append("; ".join(str(g) for g in layer))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "CliffordCircuit":
        n = None
        layers = []
        for raw in text.splitlines():
            line = raw.strip()
            if line.startswith("# qubits"):
                n = int(line.split()[-1])
                continue
            if not line or line.startswith("#"):
                continue
            layer = []
            for item in line.split(";"):
                tok = item.split()
                if tok:
                    layer.append(Gate(tok[0], tuple(int(v) for v in tok[1:])))
            layers.append(layer)
        if n is None:
            n = 1 + max((q for layer in layers for g in layer for q in g.qubits), default=-1)
        return cls(n, layers)


def simulate(circuit: CliffordCircuit, initial: Tableau | None = None, rng=None,
             snapshots: bool = False):
    """Run ``circuit`` on ``initial`` (default ``|0...0>``).

    Returns ``(tableau, record)`` where ``record`` lists ``(qubit, bit)`` for
    every MZ in order.  With ``snapshots=True`` a third item holds a copy of
    the tableau after every layer.
    """
    tab = Tableau.zero_state(circuit.n) if initial is None else initial.copy()
    if tab.n != circuit.n:
        raise ValueError("circuit and tableau sizes differ")
    rng = np.random.default_rng() if rng is None else rng
    record, snaps = [], []
    for layer in circuit.layers:
        circuit._check_layer(layer)
        for g in layer:
            if g.name == "H":
                tab.h(*g.qubits)
            elif g.name == "S":
                tab.s(*g.qubits)
            elif g.name == "X":
                tab.x(*g.qubits)
            elif g.name == "Z":
                tab.z(*g.qubits)
            elif g.name == "CNOT":
                tab.cnot(*g.qubits)
            elif g.name == "SWAP":
                tab.swap(*g.qubits)
            elif g.name == "MZ":
                bit, _ = tab.measure_z(g.qubits[0], rng)
                record.append((g.qubits[0], bit))
        if snapshots:
            snaps.append(tab.copy())
    return (tab, record, snaps) if snapshots else (tab, record)


# -- encoders ------------------------------------------------------------

def target_group(layout: CodeLayout, n_total: int | None = None, offset: int = 0) -> list:
    """Generators of |0_L>: all X-faces, all Z-faces and Z_L, placed at ``offset``."""
    n_total = layout.n if n_total is None else n_total
    gens = []
    for f in layout.x_faces:
        gens.append(PauliString.from_support("X", [q + offset for q in f.qubit_indices], n_total))
    for f in layout.z_faces:
        gens.append(PauliString.from_support("Z", [q + offset for q in f.qubit_indices], n_total))
    gens.append(PauliString.from_support("Z", [q + offset for q in layout.logical_z], n_total))
    return gens


def _face_plan(layout: CodeLayout):
    """Representative, partner and target qubits for every X-face.

    Faces in plaquette columns up to ``(d-2)//2`` grow from their left qubit
    column, the rest from their right one; the column in between is only ever
    a target, so no qubit is a control for two faces.
    """
    d = layout.distance
    split = (d - 2) // 2
    plan = []
    for face in layout.x_faces:
        i, j = face.anchor
        cc, tc = (j, j + 1) if j <= split else (j + 1, j)
        if face.weight == 4:
            rep, partner = i * d + cc, (i + 1) * d + cc
            plan.append((rep, partner, [(rep, i * d + tc), (partner, (i + 1) * d + tc)]))
        else:
            row = 0 if i == -1 else d - 1
            rep = row * d + cc
            plan.append((rep, None, [(rep, row * d + tc)]))
    return plan


def _layer_gates(gates, deps, reverse: bool):
    count = len(gates)
    succ = [[] for _ in range(count)]
    for g in range(count):
        for u in deps[g]:
            succ[u].append(g)
    before, after = (succ, deps) if reverse else (deps, succ)
    memo = {}

    def reach(g):
        # longest chain through the gates still to be placed after g
        if g not in memo:
            memo[g] = 1 + max((reach(u) for u in after[g]), default=0)
        return memo[g]

    placed, layers = {}, []
    while len(placed) < count:
        now = len(layers)
        ready = [g for g in range(count) if g not in placed
                 and all(u in placed and placed[u] < now for u in before[g])]
        ready.sort(key=lambda g: (-reach(g), g))
        busy, layer = set(), []
        for g in ready:
            c, t = gates[g]
            if c in busy or t in busy:
                continue
            busy.update((c, t))
            placed[g] = now
            layer.append((c, t))
        layers.append(layer)
    return layers[::-1] if reverse else layers


def cnot_schedule(layout: CodeLayout):
    """Hadamard qubits and CNOT layers that encode |0_L> from |0...0>.

    A CNOT may only add a qubit to a face once every face that uses the
    qubit as a control is finished with it.  Inside a face the order is
    rep->partner, rep->target, partner->target, packed as late as possible;
    if that ordering would exceed the minimal depth the last two gates are
    allowed to share a layer.
    """
    plan = _face_plan(layout)
    reps = [rep for rep, _, _ in plan]
    best = None
    for strict in (True, False):
        for reverse in (True, False):
            gates, deps, face_of = [], [], []
            controls = {}
            for k, (rep, partner, targets) in enumerate(plan):
                first = None
                if partner is not None:
                    first = len(gates)
                    gates.append((rep, partner))
                    deps.append(set())
                    face_of.append(k)
                prev = first
                for c, t in targets:
                    dep = set() if first is None else {first}
                    if strict and prev is not None and c == partner:
                        dep = {prev}
                    gates.append((c, t))
                    deps.append(dep)
                    face_of.append(k)
                    prev = len(gates) - 1
                for g in range(len(gates)):
                    if face_of[g] == k:
                        controls.setdefault(gates[g][0], []).append(g)
            for g, (c, t) in enumerate(gates):
                for u in controls.get(t, []):
                    if face_of[u] != face_of[g]:
                        deps[g].add(u)
            layers = _layer_gates(gates, deps, reverse)
            if best is None or len(layers) < len(best):
                best = layers
    return reps, best


def build_prep_unitary(d: int, mediated: bool = False) -> CliffordCircuit:
    """Unitary encoder for |0_L>.

    Without mediators the circuit acts on the d*d code qubits.  With
    ``mediated=True`` it acts on 2*d*d qubits; qubit ``d*d + c`` sits next to
    code qubit ``c`` and relays each CNOT(c, t) as CNOT(c, m) CNOT(m, t)
    CNOT(c, m), ending back in |0>.
    """
    layout = build_layout(d)
    reps, layers = cnot_schedule(layout)
    n = layout.n
    if not mediated:
        circ = CliffordCircuit(n)
        circ.append_layer(Gate("H", (q,)) for q in reps)
        for layer in layers:
            circ.append_layer(Gate("CNOT", (c, t)) for c, t in layer)
        return circ
    circ = CliffordCircuit(2 * n)
    circ.append_layer(Gate("H", (q,)) for q in reps)
    for layer in layers:
        circ.append_layer(Gate("CNOT", (c, n + c)) for c, _ in layer)
        circ.append_layer(Gate("CNOT", (n + c, t)) for c, t in layer)
        circ.append_layer(Gate("CNOT", (c, n + c)) for c, _ in layer)
    return circ


def _swap_as_cnots(a: int, b: int):
    return [[Gate("CNOT", (a, b))], [Gate("CNOT", (b, a))], [Gate("CNOT", (a, b))]]


def build_prep_dual(d: int) -> CliffordCircuit:
    """Encode two interleaved codes into |0_L> (x) |0_L> using SWAP relays.

    Code A uses qubits ``0..d*d-1`` and code B ``d*d..2*d*d-1``; qubit ``c``
    of one code neighbours qubit ``c`` of the other.  A CNOT(c, t) inside
    one code is realised by swapping ``t`` into the partner site of ``c``,
    acting locally and swapping back.  SWAPs are emitted as three CNOTs, and
    every qubit ends on its home site.
    """
    layout = build_layout(d)
    reps, layers = cnot_schedule(layout)
    n = layout.n
    circ = CliffordCircuit(2 * n)
    circ.append_layer([Gate("H", (q,)) for q in reps] + [Gate("H", (n + q,)) for q in reps])
    for layer in layers:
        for own, other in ((0, n), (n, 0)):
            pairs = [(own + c, own + t, other + c) for c, t in layer]
            swaps_in = [(t, m) for _, t, m in pairs]
            for step in range(3):
                a_to_b = step % 2 == 0
                circ.append_layer(Gate("CNOT", (a, b) if a_to_b else (b, a)) for a, b in swaps_in)
            circ.append_layer(Gate("CNOT", (c, m)) for c, _, m in pairs)
            for step in range(3):
                a_to_b = step % 2 == 0
                circ.append_layer(Gate("CNOT", (a, b) if a_to_b else (b, a)) for a, b in swaps_in)
    return circ


@dataclass
class PauliFrame:
    """Pending Pauli corrections, one bit per qubit for X and for Z."""

    x: np.ndarray
    z: np.ndarray
    outcomes: np.ndarray = None

    def as_pauli(self) -> PauliString:
        return PauliString(tuple(int(v) for v in self.x), tuple(int(v) for v in self.z))

    def weight(self) -> int:
        return int(np.count_nonzero(self.x | self.z))


def build_prep_measurement(d: int, rng=None):
    """Project |0...0> onto the code by measuring every X-face once.

    Returns the post-measurement tableau and the Pauli frame (Z corrections)
    that maps every -1 outcome back to +1.  The frame is not applied.
    """
    layout = build_layout(d)
    rng = np.random.default_rng() if rng is None else rng
    tab = Tableau.zero_state(layout.n)
    hx = layout.check_matrix("X")
    outcomes = np.zeros(len(layout.x_faces), dtype=np.uint8)
    for k, f in enumerate(layout.x_faces):
        bit, _ = tab.measure_pauli(PauliString.from_support("X", f.qubit_indices, layout.n), rng)
        outcomes[k] = bit
    lift = gf2.right_inverse(hx)
    zc = (lift.astype(np.int64) @ outcomes.astype(np.int64) % 2).astype(np.uint8)
    frame = PauliFrame(np.zeros(layout.n, dtype=np.uint8), zc, outcomes)
    return tab, frame
