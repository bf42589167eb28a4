"""Dense statevector oracle for the tunable teleportation circuit (d <= 3).

Alice holds qubits ``0..n-1`` and Bob ``n..2n-1``; qubit ``j`` of Alice is
paired with qubit ``n + j`` of Bob.  Per pair the circuit applies
``U(theta, phi)`` to Alice, ``R_XX(pi/2 - 2t)`` to the pair, ``S^dag`` to Bob,
a CNOT from Alice to Bob, ``Z`` then ``U^dag`` to Bob, and Alice is read
out in Z.  With ``U^dag Z U = sigma(theta, phi)`` Bob is left in
``exp(beta s sigma / 2)`` applied to Alice's input, ``tanh(beta) = sin 2t``,
``s = +1`` for outcome 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .lattice import CodeLayout, build_layout

__all__ = [
    "TeleportConfig",
    "LogicalTarget",
    "StateVector",
    "prepare_logical_state",
    "build_teleport_unitary",
    "run_teleport",
    "bob_conditional_state",
    "deformation_check",
    "twirl_check",
    "sample_teleported_bitstrings",
    "write_bitstrings",
    "read_bitstrings",
    "pauli_expectation",
]

MAX_DISTANCE = 3

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
SDG = np.diag([1, -1j]).astype(complex)
CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)


def rot(pauli: np.ndarray, angle: float) -> np.ndarray:
    """exp(-i angle P / 2) for an involutory P."""
    return math.cos(angle / 2) * np.eye(pauli.shape[0]) - 1j * math.sin(angle / 2) * pauli


def rxx(angle: float) -> np.ndarray:
    return rot(np.kron(X, X), angle)


def sigma(theta: float, phi: float) -> np.ndarray:
    return (math.sin(theta) * math.cos(phi) * X + math.sin(theta) * math.sin(phi) * Y
            + math.cos(theta) * Z)


def basis_rotation(theta: float, phi: float) -> np.ndarray:
    """U with U^dag Z U = sigma(theta, phi)."""
    return rot(Y, -theta) @ rot(Z, -phi)


@dataclass(frozen=True)
class TeleportConfig:
    theta: float = math.pi / 2
    phi: float = 0.0
    t: float = 0.0
    p: float = 0.0

    def __post_init__(self):
        if not -1e-12 <= self.t <= math.pi / 4 + 1e-12:
            raise ValueError("t must lie in [0, pi/4]")
        if not 0.0 <= self.p <= 0.5:
            raise ValueError("p must lie in [0, 1/2]")


@dataclass(frozen=True)
class LogicalTarget:
    theta_L: float = 0.0
    phi_L: float = 0.0


class StateVector:
    """Amplitudes as an ``(2,) * n`` tensor; qubit k is axis k."""

    def __init__(self, amplitudes: np.ndarray):
        self.psi = np.asarray(amplitudes, dtype=complex)
        self.n = self.psi.ndim

    @classmethod
    def zeros(cls, n: int) -> "StateVector":
        psi = np.zeros((2,) * n, dtype=complex)
        psi[(0,) * n] = 1.0
        return cls(psi)

    def copy(self) -> "StateVector":
        return StateVector(self.psi.copy())

    def norm(self) -> float:
        return float(np.linalg.norm(self.psi))

    def apply1(self, u: np.ndarray, q: int):
        self.psi = np.moveaxis(np.tensordot(u, self.psi, axes=([1], [q])), 0, q)

    def apply2(self, u: np.ndarray, a: int, b: int):
        u4 = u.reshape(2, 2, 2, 2)
        out = np.tensordot(u4, self.psi, axes=([2, 3], [a, b]))
        self.psi = np.moveaxis(out, [0, 1], [a, b])

    def apply_x_string(self, support):
        axes = [q for q in support]
        if axes:
            self.psi = np.flip(self.psi, axis=axes)

    def apply_z_string(self, support):
        for q in support:
            idx = [slice(None)] * self.n
            idx[q] = 1
            self.psi[tuple(idx)] *= -1


def _check_distance(d: int):
    if d > MAX_DISTANCE:
        raise ValueError(f"dense simulation is limited to d <= {MAX_DISTANCE}")


def _logical_basis(layout: CodeLayout):
    n = layout.n
    sv = StateVector.zeros(n)
    for f in layout.x_faces:
        flipped = sv.copy()
        flipped.apply_x_string(f.qubit_indices)
        sv.psi = 0.5 * (sv.psi + flipped.psi)
    sv.psi /= sv.norm()
    one = sv.copy()
    one.apply_x_string(layout.logical_x)
    return sv.psi, one.psi


def prepare_logical_state(d: int, target: LogicalTarget = LogicalTarget()) -> StateVector:
    """cos(theta_L/2)|0_L> + e^{i phi_L} sin(theta_L/2)|1_L> on d*d qubits."""
    _check_distance(d)
    zero, one = _logical_basis(build_layout(d))
    psi = math.cos(target.theta_L / 2) * zero + np.exp(1j * target.phi_L) * math.sin(target.theta_L / 2) * one
    return StateVector(psi)


def pauli_expectation(sv: StateVector, kind: str, support) -> float:
    other = sv.copy()
    if kind == "X":
        other.apply_x_string(support)
    elif kind == "Z":
        other.apply_z_string(support)
    else:
        raise ValueError(kind)
    return float(np.vdot(sv.psi, other.psi).real)


def build_teleport_unitary(d: int, cfg: TeleportConfig):
    """Ordered gate list ``[(name, qubits, matrix), ...]`` on 2*d*d qubits."""
    _check_distance(d)
    n = d * d
    u = basis_rotation(cfg.theta, cfg.phi)
    gates = []
    gates += [("U", (j,), u) for j in range(n)]
    gates += [("RXX", (j, n + j), rxx(math.pi / 2 - 2 * cfg.t)) for j in range(n)]
    gates += [("SDG", (n + j,), SDG) for j in range(n)]
    gates += [("CNOT", (j, n + j), CNOT) for j in range(n)]
    gates += [("Z", (n + j,), Z) for j in range(n)]
    gates += [("UDG", (n + j,), u.conj().T) for j in range(n)]
    return gates


def _pair_unitary(cfg: TeleportConfig) -> np.ndarray:
    u = basis_rotation(cfg.theta, cfg.phi)
    g = np.kron(u, I2)
    g = rxx(math.pi / 2 - 2 * cfg.t) @ g
    g = np.kron(I2, SDG) @ g
    g = CNOT @ g
    g = np.kron(I2, u.conj().T @ Z) @ g
    return g


def run_teleport(d: int, cfg: TeleportConfig, target: LogicalTarget = LogicalTarget(),
                 alice_errors=None, check_norm: bool = False) -> StateVector:
    """Full 2n-qubit state before Alice's readout."""
    alice = prepare_logical_state(d, target)
    n = alice.n
    if alice_errors is not None:
        alice.apply_x_string(np.nonzero(np.asarray(alice_errors))[0])
    sv = StateVector(np.multiply.outer(alice.psi, StateVector.zeros(n).psi))
    for _, qubits, mat in build_teleport_unitary(d, cfg):
        if len(qubits) == 1:
            sv.apply1(mat, qubits[0])
        else:
            sv.apply2(mat, *qubits)
        if check_norm and abs(sv.norm() - 1.0) > 1e-12:
            raise AssertionError("norm drift")
    return sv


def bob_conditional_state(sv: StateVector, alice_bits):
    """Bob's normalised state given Alice's outcomes, plus its probability."""
    n = sv.n // 2
    bob = sv.psi[tuple(int(b) for b in alice_bits)]
    prob = float(np.vdot(bob, bob).real)
    if prob < 1e-24:
        return None, prob
    return bob / math.sqrt(prob), prob


def _deformed_target(d, cfg, target, signs):
    sv = prepare_logical_state(d, target)
    sig = sigma(cfg.theta, cfg.phi)
    if cfg.t >= math.pi / 4 - 1e-12:
        ops = [(np.eye(2) + s * sig) / 2 for s in signs]
    else:
        beta = math.atanh(math.sin(2 * cfg.t))
        ops = [math.cosh(beta / 2) * np.eye(2) + s * math.sinh(beta / 2) * sig for s in signs]
    for q, op in enumerate(ops):
        sv.apply1(op, q)
    nrm = sv.norm()
    if nrm < 1e-12:
        return None
    return sv.psi / nrm


def deformation_check(d: int, cfg: TeleportConfig, target: LogicalTarget = LogicalTarget(),
                      n_outcomes: int = 16, rng=None):
    """Largest infidelity between Bob's state and the analytic deformation.

    Alice outcomes are enumerated when there are at most ``n_outcomes`` of
    them, otherwise drawn from the Born rule.  Returns
    ``(max_infidelity, excluded)`` where ``excluded`` counts outcomes whose
    conditional state vanishes.
    """
    sv = run_teleport(d, cfg, target)
    n = d * d
    if 2 ** n <= n_outcomes:
        outcomes = [tuple((k >> (n - 1 - i)) & 1 for i in range(n)) for k in range(2 ** n)]
    else:
        rng = np.random.default_rng(0) if rng is None else rng
        probs = np.sum(np.abs(sv.psi.reshape(2 ** n, -1)) ** 2, axis=1)
        picks = rng.choice(2 ** n, size=n_outcomes, p=probs / probs.sum())
        outcomes = [tuple((int(k) >> (n - 1 - i)) & 1 for i in range(n)) for k in picks]
    worst, excluded = 0.0, 0
    for bits in outcomes:
        bob, _ = bob_conditional_state(sv, bits)
        ref = _deformed_target(d, cfg, target, [1 - 2 * b for b in bits])
        if bob is None or ref is None:
            excluded += 1
            continue
        fid = abs(np.vdot(ref.ravel(), bob.ravel())) ** 2
        worst = max(worst, 1.0 - fid)
    return worst, excluded


def _superop(kraus) -> np.ndarray:
    return sum(np.kron(k, k.conj()) for k in kraus)


def twirl_check(theta: float, t: float) -> float:
    """Max-norm distance between the outcome-averaged pair channel and its dephasing form."""
    if not (math.isclose(theta, math.pi / 2) or math.isclose(theta, math.pi / 4)):
        raise ValueError("theta must be pi/2 or pi/4")
    g = _pair_unitary(TeleportConfig(theta, 0.0, t, 0.0)).reshape(2, 2, 2, 2)
    # Kraus operator for Alice outcome m: input on Alice, Bob starts in |0>
    kraus = [g[m, :, :, 0] for m in (0, 1)]
    sig = sigma(theta, 0.0)
    target = [math.cos(t) * I2, math.sin(t) * sig]
    return float(np.max(np.abs(_superop(kraus) - _superop(target))))


def _pair_error_ops(cfg: TeleportConfig) -> np.ndarray:
    g = _pair_unitary(cfg)
    return g @ np.kron(X, I2) @ g.conj().T


def sample_teleported_bitstrings(d: int, cfg: TeleportConfig, target: LogicalTarget = LogicalTarget(),
                                 shots: int = 1000, rng=None, basis: str = "Z",
                                 return_alice: bool = False):
    """Born-rule samples of Bob's readout after teleportation.

    Each shot draws i.i.d. X flips at rate ``cfg.p`` on Alice's prepared
    state, runs the circuit, and samples Alice's and Bob's outcomes jointly.
    ``basis='X'`` rotates Bob by Hadamards before the readout.
    """
    if shots <= 0:
        raise ValueError("shots must be positive")
    _check_distance(d)
    rng = np.random.default_rng() if rng is None else rng
    n = d * d
    base = run_teleport(d, cfg, target)
    if basis == "X":
        for j in range(n):
            base.apply1(H, n + j)
    elif basis != "Z":
        raise ValueError("basis must be 'Z' or 'X'")
    err_op = _pair_error_ops(cfg)
    h_all = np.kron(I2, H) if basis == "X" else np.eye(4)
    err_op = h_all @ err_op @ h_all.conj().T
    errors = (rng.random((shots, n)) < cfg.p).astype(np.uint8)
    keys = np.packbits(errors, axis=1, bitorder="little")
    uniq, inverse = np.unique(keys, axis=0, return_inverse=True)
    inverse = np.asarray(inverse).ravel()
    bob_bits = np.zeros((shots, n), dtype=np.uint8)
    alice_bits = np.zeros((shots, n), dtype=np.uint8)
    shifts = np.arange(2 * n - 1, -1, -1)
    for u in range(len(uniq)):
        rows = np.nonzero(inverse == u)[0]
        pattern = errors[rows[0]]
        sv = base.copy()
        for j in np.nonzero(pattern)[0]:
            sv.apply2(err_op, int(j), n + int(j))
        probs = np.abs(sv.psi.ravel()) ** 2
        idx = rng.choice(probs.size, size=rows.size, p=probs / probs.sum())
        bits = ((idx[:, None] >> shifts[None, :]) & 1).astype(np.uint8)
        alice_bits[rows] = bits[:, :n]
        bob_bits[rows] = bits[:, n:]
    return (bob_bits, alice_bits) if return_alice else bob_bits


def write_bitstrings(path, bits, d: int, cfg: TeleportConfig, seed) -> None:
    header = f"# d={d} theta={cfg.theta!r} phi={cfg.phi!r} t={cfg.t!r} p={cfg.p!r} seed={seed}"
    with open(path, "w") as fh:
        fh.write(header + "\n")
        for row in np.asarray(bits, dtype=np.uint8):
            fh.write("".join("1" if b else "0" for b in row) + "\n")


def read_bitstrings(path):
    """Return (header dict, bits array)."""
    meta, rows = {}, []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                for tok in line[1:].split():
                    if "=" in tok:
                        k, v = tok.split("=", 1)
                        meta[k] = v
                continue
            rows.append([1 if c == "1" else 0 for c in line])
    return meta, np.array(rows, dtype=np.uint8)
