"""Command-line entry point."""

from __future__ import annotations

import csv
import io
import json
import math
import sys
from dataclasses import asdict

import click
import numpy as np

from . import analysis, clifford, lattice, noise, oracle_sv, statmech
from .decoders import decode_bitstrings


def parse_angle(text: str) -> float:
    """Accept plain floats or multiples of pi such as ``0.1pi``, ``pi/4``."""
    s = str(text).strip().replace(" ", "")
    if "pi" not in s:
        return float(s)
    head, _, tail = s.partition("pi")
    coef = 1.0 if head in ("", "+") else -1.0 if head == "-" else float(head.rstrip("*"))
    if tail.startswith("/"):
        coef /= float(tail[1:])
    elif tail:
        raise click.BadParameter(f"cannot parse angle {text!r}")
    return coef * math.pi


def parse_grid(text: str) -> list:
    """``start:stop:count`` (inclusive) or a comma-separated list."""
    if ":" in text:
        a, b, k = text.split(":")
        return [float(v) for v in np.linspace(parse_angle(a), parse_angle(b), int(k))]
    return [parse_angle(v) for v in text.split(",") if v]


def parse_ints(text: str) -> list:
    return [int(v) for v in str(text).split(",") if v]


def _emit(rows: list, columns, out, fmt: str):
    if fmt == "json":
        text = json.dumps(rows, indent=2)
    else:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=list(columns), lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: r[k] for k in columns})
        text = buf.getvalue()
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


def _emit_plot(path, series_rows):
    """Figure-ready rows ``x,y,yerr,series``."""
    with open(path, "w") as fh:
        fh.write("x,y,yerr,series\n")
        for x, y, e, s in series_rows:
            fh.write(f"{x!r},{y!r},{e!r},{s}\n")


theta_opt = click.option("--theta", default="pi/2", type=click.Choice(["pi/2", "pi/4"]), show_default=True)
seed_opt = click.option("--seed", default=0, type=int, show_default=True)
out_opt = click.option("--out", type=click.Path(dir_okay=False), default=None, help="Output path (stdout if omitted).")
fmt_opt = click.option("--format", "fmt", default="csv", type=click.Choice(["csv", "json"]), show_default=True)
plot_opt = click.option("--emit-plot-data", type=click.Path(dir_okay=False), default=None,
                        help="Also write x,y,yerr,series rows to this path.")


@click.group()
def main():
    """Surface-code teleportation workbench."""


@main.command()
@click.option("--distance", "-d", default=3, type=int, show_default=True)
@out_opt
@fmt_opt
def layout(distance, out, fmt):
    """Print the qubit/face layout of a distance-d code."""
    lay = lattice.build_layout(distance)
    if fmt == "json":
        text = lattice.layout_to_json(lay)
        if out:
            open(out, "w").write(text)
        else:
            click.echo(text)
        return
    rows = [{"kind": f.kind, "anchor": f"{f.anchor[0]}:{f.anchor[1]}", "qubits": " ".join(map(str, sorted(f.qubit_indices)))}
            for f in lay.z_faces + lay.x_faces]
    _emit(rows, ("kind", "anchor", "qubits"), out, fmt)


@main.command("prep-check")
@click.option("--distance", "-d", "distances", default="2,3,4,5,6,7", show_default=True)
@seed_opt
@out_opt
@fmt_opt
def prep_check(distances, seed, out, fmt):
    """Verify every preparation route against the target stabilizer group."""
    rows = []
    for d in parse_ints(distances):
        lay = lattice.build_layout(d)
        n = lay.n
        routes = {
            "unitary": clifford.build_prep_unitary(d),
            "mediated": clifford.build_prep_unitary(d, mediated=True),
            "dual": clifford.build_prep_dual(d),
        }
        for name, circ in routes.items():
            tab, _ = clifford.simulate(circ)
            if name == "dual":
                ok = tab.group_equals(clifford.target_group(lay, 2 * n) + clifford.target_group(lay, 2 * n, n))
            else:
                target = clifford.target_group(lay, circ.n)
                if name == "mediated":
                    target += [clifford.PauliString.from_support("Z", [k], circ.n) for k in range(n, 2 * n)]
                ok = tab.group_equals(target)
            rows.append({"d": d, "route": name, "depth": circ.two_qubit_depth(), "ok": int(ok)})
        tab, frame = clifford.build_prep_measurement(d, noise.rng_stream(seed, d))
        tab.apply_pauli(frame.as_pauli())
        rows.append({"d": d, "route": "measurement", "depth": 0,
                     "ok": int(tab.group_equals(clifford.target_group(lay)))})
    _emit(rows, ("d", "route", "depth", "ok"), out, fmt)
    if not all(r["ok"] for r in rows):
        sys.exit(1)


@main.command()
@click.option("--distance", "-d", default=3, type=int, show_default=True)
@theta_opt
@click.option("--phi", default="0", show_default=True)
@click.option("--t", "t_text", default="0", show_default=True, help="Entangling detuning, e.g. 0.1pi.")
@click.option("--p", default=0.0, type=float, show_default=True)
@click.option("--theta-l", default="0", show_default=True, help="Logical polar angle.")
@click.option("--basis", default="Z", type=click.Choice(["Z", "X"]), show_default=True)
@click.option("--shots", default=0, type=int, show_default=True, help="Born samples to write (0: checks only).")
@seed_opt
@out_opt
def oracle(distance, theta, phi, t_text, p, theta_l, basis, shots, seed, out):
    """Run the statevector identity checks and optionally sample Bob's bitstrings."""
    cfg = oracle_sv.TeleportConfig(parse_angle(theta), parse_angle(phi), parse_angle(t_text), p)
    target = oracle_sv.LogicalTarget(parse_angle(theta_l))
    rng = noise.rng_stream(seed, 0)
    report = {}
    if p == 0.0:
        report["deformation_infidelity"], report["excluded"] = oracle_sv.deformation_check(distance, cfg, target, rng=rng)
    report["twirl_distance"] = oracle_sv.twirl_check(cfg.theta, cfg.t)
    if shots:
        bits = oracle_sv.sample_teleported_bitstrings(distance, cfg, target, shots, noise.rng_stream(seed, 1), basis)
        if not out:
            raise click.UsageError("--out is required when sampling")
        oracle_sv.write_bitstrings(out, bits, distance, cfg, seed)
        report["written"] = out
    click.echo(json.dumps(report))


def _load_config(path):
    with open(path) as fh:
        return json.load(fh)


@main.command()
@click.option("--config", type=click.Path(exists=True, dir_okay=False), default=None,
              help="JSON file with SweepSpec keys; command-line flags override it.")
@click.option("--distance", "-d", "distances", default=None, help="Comma-separated distances.")
@click.option("--theta", default=None, type=click.Choice(["pi/2", "pi/4"]))
@click.option("--t-grid", default=None, help="start:stop:count or comma list, e.g. 0.08pi:0.14pi:7.")
@click.option("--q-grid", default=None, help="Sweep the flip rate directly instead of t.")
@click.option("--p", default=None, type=float)
@click.option("--shots", default=None, type=int)
@click.option("--decoder", default=None, type=click.Choice(["mwpm", "ml"]))
@click.option("--seed", default=None, type=int)
@click.option("--workers", default=None, type=int)
@out_opt
@fmt_opt
@plot_opt
def sweep(config, distances, theta, t_grid, q_grid, p, shots, decoder, seed, workers, out, fmt, emit_plot_data):
    """Monte-Carlo logical error rates over a t (or q) grid."""
    cfg = _load_config(config) if config else {}
    if t_grid:
        cfg["grid"], cfg["x_kind"] = parse_grid(t_grid), "t"
    if q_grid:
        cfg["grid"], cfg["x_kind"] = parse_grid(q_grid), "q"
    if isinstance(cfg.get("grid"), str):
        cfg["grid"] = parse_grid(cfg["grid"])
    for key, val in (("distances", parse_ints(distances) if distances else None), ("p", p),
                     ("shots", shots), ("decoder", decoder), ("seed", seed), ("workers", workers)):
        if val is not None:
            cfg[key] = val
    if theta:
        cfg["theta"] = theta
    if isinstance(cfg.get("theta"), str):
        cfg["theta"] = parse_angle(cfg["theta"])
    if "grid" not in cfg or "distances" not in cfg:
        raise click.UsageError("a grid (--t-grid/--q-grid or config) and distances are required")
    spec = analysis.SweepSpec(**cfg)
    table = analysis.run_sweep(spec)
    _emit(table.rows, analysis.SweepTable.COLUMNS, out, fmt)
    if emit_plot_data:
        xcol = "t" if spec.x_kind == "t" else "q"
        _emit_plot(emit_plot_data, [(r[xcol], r["p_L"], r["stderr"], f"d={r['d']}") for r in table.rows])


@main.command()
@click.option("--input", "inp", required=True, type=click.Path(exists=True, dir_okay=False),
              help="Bitstring file written by the oracle command.")
@click.option("--q", default=None, type=float, help="Decoder flip rate (default: from the file header).")
@click.option("--decoder", default="ml", type=click.Choice(["mwpm", "ml"]), show_default=True)
@click.option("--basis", default="Z", type=click.Choice(["Z", "X"]), show_default=True)
@out_opt
@fmt_opt
def decode(inp, q, decoder, basis, out, fmt):
    """Decode readout bitstrings shot by shot."""
    meta, bits = oracle_sv.read_bitstrings(inp)
    d = int(meta["d"])
    if q is None:
        theta = float(meta["theta"])
        q = noise.syndrome_flip_rate(theta, noise.effective_entangling(theta, float(meta["t"]), float(meta["p"])))
    res = decode_bitstrings(lattice.build_layout(d), bits, q, decoder, basis)
    rows = [{"shot": i, "syndrome_weight": int(res["syndrome_weight"][i]), "logical_flip": int(res["logical_flip"][i]),
             "corrected_bit": int(res["corrected_bit"][i]), "L0": float(res["L0"][i]), "L1": float(res["L1"][i])}
            for i in range(len(bits))]
    _emit(rows, ("shot", "syndrome_weight", "logical_flip", "corrected_bit", "L0", "L1"), out, fmt)


@main.command()
@click.option("--input", "inp", required=True, type=click.Path(exists=True, dir_okay=False), help="Sweep CSV.")
@click.option("--variable", default="t", type=click.Choice(["t", "t_eff", "q"]), show_default=True)
@click.option("--bootstrap", default=200, type=int, show_default=True)
@seed_opt
@out_opt
@plot_opt
def fss(inp, variable, bootstrap, seed, out, emit_plot_data):
    """Finite-size-scaling fit of a sweep table."""
    table = analysis.SweepTable.from_csv(open(inp).read())
    fit = analysis.fss_fit(table, variable, n_boot=bootstrap, seed=seed)
    doc = fit.as_dict()
    if variable != "q":
        doc["x_c_over_pi"] = fit.x_c / math.pi
    text = json.dumps(doc, indent=2)
    if out:
        open(out, "w").write(text)
    else:
        click.echo(text)
    if emit_plot_data:
        rows = []
        for r in table.rows:
            u = (r[variable] - fit.x_c) * r["d"] ** (1 / fit.nu)
            rows.append((u, r["p_L"], r["stderr"], f"d={r['d']}"))
        _emit_plot(emit_plot_data, rows)


@main.command()
@click.option("--L", "sizes", default="4,8,12,16", show_default=True)
@click.option("--p-grid", default="0.25:0.33:9", show_default=True)
@out_opt
@fmt_opt
@plot_opt
def renyi(sizes, p_grid, out, fmt, emit_plot_data):
    """Renyi-2 relative entropy from exact Ising partition functions."""
    rows = [{"L": L, "p": p, "D2": statmech.ising_relative_entropy(L, p)}
            for L in parse_ints(sizes) for p in parse_grid(p_grid)]
    _emit(rows, ("L", "p", "D2"), out, fmt)
    if emit_plot_data:
        _emit_plot(emit_plot_data, [(r["p"], r["D2"], 0.0, f"L={r['L']}") for r in rows])


@main.command()
@click.option("--distance", "-d", default=2, type=int, show_default=True)
@click.option("--q", default=None, type=float, help="Per-copy flip rate.")
@click.option("--p", default=None, type=float, help="Composite rate p = 2q(1-q); converted to q.")
@click.option("--kind", default="same", type=click.Choice(["same", "orthogonal"]), show_default=True)
@click.option("--shots", default=40000, type=int, show_default=True)
@seed_opt
@out_opt
@fmt_opt
def bell(distance, q, p, kind, shots, seed, out, fmt):
    """Estimate tr(rho_0 rho_k) from simulated Bell readout."""
    if (q is None) == (p is None):
        raise click.UsageError("give exactly one of --q or --p")
    q = statmech.per_copy_rate(p) if q is None else q
    est = statmech.simulate_bell_experiment(distance, q, kind, shots, noise.rng_stream(seed, distance))
    rows = [{"d": distance, "q": q, "kind": kind, "purity": est.value, "stderr": est.stderr, "shots": est.shots}]
    _emit(rows, ("d", "q", "kind", "purity", "stderr", "shots"), out, fmt)


@main.command()
@click.option("--counts", required=True, type=click.Path(exists=True, dir_okay=False),
              help="JSON: list of {qubits: [...], counts: [...]} per face.")
@click.option("--calibration", required=True, type=click.Path(exists=True, dir_okay=False))
@out_opt
@fmt_opt
def mitigate(counts, calibration, out, fmt):
    """Readout-mitigated face parities."""
    cal_fmt = "csv" if calibration.endswith(".csv") else "json"
    mats = noise.load_response_matrices(open(calibration).read(), cal_fmt)
    rows = []
    for i, face in enumerate(json.load(open(counts))):
        qubits = face["qubits"]
        val = noise.mitigate_readout(face["counts"], [mats[qb] for qb in qubits])
        rows.append({"face": i, "qubits": " ".join(map(str, qubits)), "parity": val})
    _emit(rows, ("face", "qubits", "parity"), out, fmt)


@main.command("fit-tomo")
@click.option("--input", "inp", required=True, type=click.Path(exists=True, dir_okay=False),
              help="CSV with columns theta_L,x,z.")
@out_opt
def fit_tomo(inp, out):
    """Fit logical X/Z error probabilities to tomography data."""
    data = list(csv.DictReader(open(inp)))
    th = [parse_angle(r["theta_L"]) for r in data]
    fit = analysis.fit_logical_asymmetry(th, [float(r["x"]) for r in data], [float(r["z"]) for r in data])
    doc = asdict(fit)
    doc["fidelity"] = [analysis.logical_fidelity(t, float(r["x"]), float(r["z"])) for t, r in zip(th, data)]
    text = json.dumps(doc, indent=2)
    if out:
        open(out, "w").write(text)
    else:
        click.echo(text)


if __name__ == "__main__":
    main()
