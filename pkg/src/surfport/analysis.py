"""Logical-error sweeps, finite-size-scaling fits and logical tomography fits."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, asdict

import numpy as np
from scipy.optimize import least_squares

from .decoders import decode_bitstrings
from .lattice import build_layout
from .noise import effective_entangling, rng_stream, sample_error, syndrome_flip_rate

__all__ = [
    "SweepSpec",
    "SweepTable",
    "ScalingFit",
    "TomographyFit",
    "run_sweep",
    "fss_fit",
    "pairwise_crossings",
    "fit_logical_asymmetry",
    "logical_fidelity",
]

Q_FLOOR = 1e-12


@dataclass
class SweepSpec:
    """Grid of points to simulate.

    With ``x_kind='t'`` the grid holds detunings and each point's decoder
    rate follows from ``theta`` and ``p``; with ``x_kind='q'`` the grid holds
    flip rates directly.
    """

    grid: list
    distances: list
    shots: int = 10000
    theta: float = math.pi / 2
    p: float = 0.0
    decoder: str = "ml"
    seed: int = 0
    x_kind: str = "t"
    chunk: int = 20000
    workers: int = 1

    def __post_init__(self):
        if not len(self.grid) or not len(self.distances):
            raise ValueError("grid and distances must be non-empty")
        if self.shots < 1:
            raise ValueError("shots must be at least 1")
        if self.x_kind not in ("t", "q"):
            raise ValueError("x_kind must be 't' or 'q'")


@dataclass
class SweepTable:
    rows: list = field(default_factory=list)

    COLUMNS = ("theta", "t", "t_eff", "q", "d", "shots", "p_L", "stderr")

    def column(self, name: str) -> np.ndarray:
        return np.array([r[name] for r in self.rows], dtype=float)

    def to_csv(self) -> str:
        lines = [",".join(self.COLUMNS)]
        for r in self.rows:
            lines.append(",".join(repr(r[c]) if isinstance(r[c], float) else str(r[c]) for c in self.COLUMNS))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_csv(cls, text: str) -> "SweepTable":
        lines = [ln for ln in text.strip().splitlines() if ln]
        head = lines[0].split(",")
        rows = []
        for ln in lines[1:]:
            vals = ln.split(",")
            row = {}
            for k, v in zip(head, vals):
                row[k] = int(v) if k in ("d", "shots") else float(v)
            rows.append(row)
        return cls(rows)


@dataclass
class ScalingFit:
    x_c: float
    x_c_ci: tuple
    nu: float
    nu_ci: tuple
    coeffs: tuple
    chi2_dof: float
    variable: str
    bootstrap: int

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass
class TomographyFit:
    p_X: float
    p_X_err: float
    p_Z: float
    p_Z_err: float


def _point_rate(spec: SweepSpec, x: float):
    if spec.x_kind == "q":
        return math.nan, math.nan, float(x)
    te = effective_entangling(spec.theta, float(x), spec.p)
    return float(x), te, syndrome_flip_rate(spec.theta, te)


def _run_point(spec: SweepSpec, i_x: int, i_d: int):
    d = int(spec.distances[i_d])
    layout = build_layout(d)
    t, te, q = _point_rate(spec, spec.grid[i_x])
    rng = rng_stream(spec.seed, i_d, i_x)
    fails, done = 0, 0
    while done < spec.shots:
        m = min(spec.chunk, spec.shots - done)
        errs = sample_error(layout, q, rng, m)
        dq = min(max(q, Q_FLOOR), 0.5 - Q_FLOOR)
        out = decode_bitstrings(layout, errs, dq, spec.decoder)
        fails += int(out["corrected_bit"].sum())
        done += m
    p_l = fails / spec.shots
    return {
        "theta": float(spec.theta) if spec.x_kind == "t" else math.nan,
        "t": t,
        "t_eff": te,
        "q": q,
        "d": d,
        "shots": int(spec.shots),
        "p_L": p_l,
        "stderr": math.sqrt(p_l * (1 - p_l) / spec.shots),
    }


def run_sweep(spec: SweepSpec) -> SweepTable:
    """Monte-Carlo logical error rate on every (x, d) point.

    Each point draws from its own stream keyed by (seed, distance index,
    grid index), so the table does not depend on ``workers``.
    """
    jobs = [(i_x, i_d) for i_d in range(len(spec.distances)) for i_x in range(len(spec.grid))]
    if spec.workers > 1:
        with ThreadPoolExecutor(spec.workers) as pool:
            rows = list(pool.map(lambda job: _run_point(spec, *job), jobs))
    else:
        rows = [_run_point(spec, *job) for job in jobs]
    return SweepTable(rows)


def _ansatz(params, x, d):
    xc, nu, c0, c1, c2 = params
    u = (x - xc) * d ** (1.0 / nu)
    return c0 + c1 * u + c2 * u * u


def _fit_once(x, d, y, sig, x0):
    res = least_squares(lambda p: (_ansatz(p, x, d) - y) / sig, x0, method="lm", max_nfev=4000)
    return res


def pairwise_crossings(table: SweepTable, variable: str = "q"):
    """Linear-interpolated crossing of consecutive-distance curves."""
    x = table.column(variable)
    d = table.column("d").astype(int)
    y = table.column("p_L")
    ds = sorted(set(d))
    out = []
    for a, b in zip(ds[:-1], ds[1:]):
        xa, ya = x[d == a], y[d == a]
        xb, yb = x[d == b], y[d == b]
        order = np.argsort(xa)
        xa, ya = xa[order], ya[order]
        yb = np.interp(xa, np.sort(xb), yb[np.argsort(xb)])
        diff = yb - ya
        hit = np.nonzero(np.diff(np.sign(diff)) > 0)[0]
        if hit.size:
            k = hit[0]
            frac = -diff[k] / (diff[k + 1] - diff[k])
            out.append((a, b, float(xa[k] + frac * (xa[k + 1] - xa[k]))))
    return out


def fss_fit(table: SweepTable, variable: str = "q", nu0: float = 1.5, n_boot: int = 200,
            seed: int = 0) -> ScalingFit:
    """Fit ``p_L = sum_k c_k [(x - x_c) d^(1/nu)]^k`` for k <= 2.

    Confidence intervals come from a parametric bootstrap that redraws each
    point binomially.  Raises if the fit does not converge or if ``x_c``
    lands outside the swept interval.
    """
    x = table.column(variable)
    d = table.column("d")
    y = table.column("p_L")
    shots = table.column("shots")
    if len(set(d)) < 3 or len(set(x)) < 5:
        raise ValueError("need at least 3 distances and 5 grid points")
    sig = np.sqrt((y * (1 - y) + 1.0 / shots) / shots)
    cross = pairwise_crossings(table, variable)
    xc0 = float(np.median([c for _, _, c in cross])) if cross else float(np.median(x))
    y_mid = float(np.interp(xc0, np.sort(x[d == d.min()]), y[d == d.min()][np.argsort(x[d == d.min()])]))
    x0 = np.array([xc0, nu0, y_mid, 1.0, 0.0])
    res = _fit_once(x, d, y, sig, x0)
    if not res.success:
        raise RuntimeError(f"scaling fit did not converge: {res.message}")
    lo, hi = float(x.min()), float(x.max())
    if not lo < res.x[0] < hi:
        raise RuntimeError(f"fitted critical point {res.x[0]:.5g} outside [{lo:.5g}, {hi:.5g}]")
    rng = np.random.default_rng(seed)
    boot = []
    for _ in range(n_boot):
        yb = rng.binomial(shots.astype(int), np.clip(y, 0, 1)) / shots
        sb = np.sqrt((yb * (1 - yb) + 1.0 / shots) / shots)
        rb = _fit_once(x, d, yb, sb, res.x)
        if rb.success and lo < rb.x[0] < hi and rb.x[1] > 0:
            boot.append(rb.x[:2])
    boot = np.array(boot) if boot else np.array([res.x[:2]])
    dof = max(len(y) - 5, 1)
    chi2 = float(np.sum(res.fun ** 2) / dof)
    return ScalingFit(
        x_c=float(res.x[0]),
        x_c_ci=(float(np.percentile(boot[:, 0], 2.5)), float(np.percentile(boot[:, 0], 97.5))),
        nu=float(abs(res.x[1])),
        nu_ci=(float(np.percentile(np.abs(boot[:, 1]), 2.5)), float(np.percentile(np.abs(boot[:, 1]), 97.5))),
        coeffs=tuple(float(c) for c in res.x[2:]),
        chi2_dof=chi2,
        variable=variable,
        bootstrap=len(boot),
    )


def fit_logical_asymmetry(theta_L, x_vals, z_vals) -> TomographyFit:
    """Least squares for <X_L> = (1-2p_Z) sin(theta_L) and <Z_L> = (1-2p_X) cos(theta_L)."""
    th = np.asarray(theta_L, dtype=float)
    xv = np.asarray(x_vals, dtype=float)
    zv = np.asarray(z_vals, dtype=float)
    if th.size < 3:
        raise ValueError("need at least three angles")
    s, c = np.sin(th), np.cos(th)
    ss, cc = float(s @ s), float(c @ c)
    if ss < 1e-9 or cc < 1e-9:
        raise ValueError("angle set does not constrain both axes")
    a_x = float(s @ xv) / ss
    a_z = float(c @ zv) / cc
    dof = max(th.size - 1, 1)
    err_x = math.sqrt(float(np.sum((xv - a_x * s) ** 2)) / dof / ss)
    err_z = math.sqrt(float(np.sum((zv - a_z * c) ** 2)) / dof / cc)
    p_z = min(max((1 - a_x) / 2, 0.0), 0.5)
    p_x = min(max((1 - a_z) / 2, 0.0), 0.5)
    return TomographyFit(p_X=p_x, p_X_err=err_z / 2, p_Z=p_z, p_Z_err=err_x / 2)


def logical_fidelity(theta_L: float, x: float, z: float) -> float:
    return (1 + math.cos(theta_L) * z + math.sin(theta_L) * x) / 2
