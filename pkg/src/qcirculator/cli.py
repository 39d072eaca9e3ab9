"""Command-line interface: ``qcirculator {matrix,scan,g2,analytic,metrics}``.

All rates on the command line and in parameter files are MHz (omega / 2 pi)
unless ``--units angular`` is given. Exit codes: 0 success, 2 configuration
error, 3 solver error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import io as qio
from .analytic import Coupling, analytic_metrics, analytic_transmissions, atom_induced_loss
from .correlations import DarkPortError, correlation_epsilon, default_tau_grid, g2
from .model import TWO_PI, AtomState, Fiber, ModelKind, SystemParams, build_model
from .observables import Direction, metrics, transmission_matrix
from .published import MATRICES
from .quantum import EvolutionError, SteadyStateError
from .scan import DEFAULT_GRID, Objective, find_optimum, scan_coupling

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER = 0, 2, 3

STATE_OF_THE_ART = {"kappa_0": 0.5, "g": 30.0, "gamma": 3.0, "kappa_a": 7.5, "kappa_b": 7.5, "alpha": math.sqrt(0.97)}


def _parse_set(items):
    out = {}
    for item in items or []:
        key, sep, value = item.partition("=")
        if not sep:
            raise qio.ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        try:
            out[key.strip()] = json.loads(value)
        except json.JSONDecodeError:
            out[key.strip()] = value
    return out


def _common(p: argparse.ArgumentParser, model=True, state=True):
    p.add_argument("--params", help="JSON parameter file (keys = SystemParams fields)")
    p.add_argument("--set", action="append", metavar="KEY=VALUE", help="inline parameter override (repeatable)")
    p.add_argument("--units", choices=["mhz", "angular"], default="mhz", help="unit of rate inputs")
    p.add_argument("--ratio", type=float, help="working point kappa_tot/2kappa_0 with kappa_a = kappa_b + kappa_0")
    if state:
        p.add_argument("--atom-state", choices=[s.value for s in AtomState])
    if model:
        p.add_argument("--model", choices=[k.value for k in ModelKind], default=ModelKind.TWO_MODE.value)
    p.add_argument("--nmax", type=int, help="Fock truncation per mode")
    p.add_argument("--eps", type=float, help="probe amplitude, sqrt(photons/us)")
    p.add_argument("--out", help="output file (default: stdout)")
    p.add_argument("--format", choices=["csv", "json"], default="csv")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qcirculator", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("matrix", help="4x4 transmission matrix and circulator metrics")
    _common(p)
    p.add_argument("--direction", choices=[d.value for d in Direction], help="ideal circulator to compare with")

    p = sub.add_parser("scan", help="sweep kappa_tot/2kappa_0 along the critical-coupling line")
    _common(p)
    p.add_argument("--grid-min", type=float, default=DEFAULT_GRID[0])
    p.add_argument("--grid-max", type=float, default=DEFAULT_GRID[1])
    p.add_argument("--points", type=int, default=DEFAULT_GRID[2])
    p.add_argument("--objective", choices=[o.value for o in Objective], default=Objective.FIDELITY.value)

    p = sub.add_parser("g2", help="second-order correlation g2(tau) of one output port")
    _common(p, model=False)
    p.add_argument("--input", type=int, required=True, dest="input_port")
    p.add_argument("--output", type=int, required=True, dest="output_port")
    p.add_argument("--points", type=int, default=64)
    p.add_argument("--span", type=float, default=5.0, help="tau range in units of 1/kappa_tot")

    p = sub.add_parser("analytic", help="closed-form transmissions, survival and fidelity")
    _common(p, model=False, state=False)
    p.add_argument("--preset", choices=["state-of-the-art"], help="use a named parameter preset")

    p = sub.add_parser("metrics", help="metrics of a given transmission matrix")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--matrix", help="CSV file with a 4x4 matrix")
    src.add_argument("--published", choices=sorted(MATRICES), help="use a measured matrix")
    p.add_argument("--direction", choices=[d.value for d in Direction], default=Direction.FORWARD.value)
    p.add_argument("--out")
    p.add_argument("--format", choices=["csv", "json"], default="json")
    return parser


def _params(args, preset: dict | None = None) -> SystemParams:
    overrides = dict(preset or {})
    overrides.update(_parse_set(getattr(args, "set", None)))
    if getattr(args, "atom_state", None):
        overrides["atom_state"] = args.atom_state
    if args.nmax is not None:
        overrides["n_max"] = args.nmax
    if args.eps is not None:
        overrides["epsilon"] = args.eps
    params = qio.load_params(args.params, overrides, angular=args.units == "angular")
    if args.ratio is not None:
        try:
            params = params.at_ratio(args.ratio)
        except ValueError as exc:
            raise qio.ConfigError(str(exc)) from exc
    return params


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _fmt_db(x: float) -> str:
    if math.isinf(x):
        return ">99" if x > 0 else "<-99"
    return f"{x:.2f}"


def _summary(m) -> str:
    iso = ", ".join(_fmt_db(x) for x in m.isolations)
    eta_i = ", ".join(f"{x:.4f}" for x in m.eta_per_port)
    return (
        f"fidelity ({m.direction.value}) = {m.fidelity:.4f}\n"
        f"eta = {m.eta:.4f}  (per port: {eta_i})\n"
        f"isolations [dB] = ({iso})\n"
    )


def cmd_matrix(args) -> int:
    params = _params(args)
    if args.direction:
        direction = Direction(args.direction)
    else:
        direction = Direction.BACKWARD if params.atom_state is AtomState.M_MINUS_3 else Direction.FORWARD
    t = transmission_matrix(params, ModelKind(args.model))
    m = metrics(t, direction)
    if args.format == "json":
        _emit(qio.matrix_json(t, m, params, args.model), args.out)
        if args.out:
            sys.stdout.write(_summary(m))
    else:
        body = qio.matrix_csv(t)
        if args.out:
            _emit(body, args.out)
            sys.stdout.write(_summary(m))
        else:
            sys.stdout.write(body + "".join(f"# {line}\n" for line in _summary(m).splitlines()))
    return EXIT_OK


def cmd_scan(args) -> int:
    if args.points < 1:
        raise qio.ConfigError("--points must be positive")
    params = _params(args)
    grid = np.geomspace(args.grid_min, args.grid_max, args.points)
    scan = scan_coupling(params, grid, ModelKind(args.model), Objective(args.objective))
    best = find_optimum(scan)
    text = qio.scan_csv(scan) if args.format == "csv" else qio.scan_json(scan, params, args.model)
    _emit(text, args.out)
    line = (
        f"optimum ({scan.objective.value}): ratio = {best.kappa_tot_over_2kappa0:.4g}, "
        f"fidelity = {best.metrics.fidelity:.4f}, eta = {best.metrics.eta:.4f}\n"
    )
    (sys.stdout if args.out else sys.stderr).write(line)
    return EXIT_OK


def cmd_g2(args) -> int:
    params = _params(args)
    if args.eps is None:
        params = params.replace(epsilon=correlation_epsilon(params))
    try:
        model = build_model(params, args.input_port, ModelKind.TWO_MODE)
        tau = default_tau_grid(params, args.points, args.span)
        trace = g2(model, args.output_port, tau)
    except DarkPortError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_CONFIG
    text = qio.g2_csv(trace) if args.format == "csv" else qio.g2_json(trace, params, ModelKind.TWO_MODE.value)
    _emit(text, args.out)
    (sys.stdout if args.out else sys.stderr).write(
        f"g2(0) for {trace.input_port} -> {trace.output_port} = {trace.g2_zero:.4f}\n"
    )
    return EXIT_OK


def _analytic_table(params: SystemParams) -> list[tuple[str, str]]:
    rows = []
    gamma_full = atom_induced_loss(params.g, params.gamma, params.delta_al) / TWO_PI
    rows.append(("Gamma [2pi MHz]", f"{gamma_full.real:.6g}" + (f" {gamma_full.imag:+.6g}i" if gamma_full.imag else "")))
    for coupling in Coupling:
        tr = analytic_transmissions(params, coupling, Fiber.A)
        loss = tr.atom_loss / TWO_PI
        rows.append((f"Gamma_{coupling.value} [2pi MHz]", f"{loss.real:.6g}"))
        rows.append((f"T_trans_{coupling.value}", f"{tr.t_trans:.6g}"))
        rows.append((f"T_cross_{coupling.value}", f"{tr.t_cross:.6g}"))
    if abs(params.kappa_a - params.kappa_b) <= 1e-12 * max(1.0, params.kappa_a):
        am = analytic_metrics(params)
        rows += [
            ("eta_fw", f"{am.eta_fw:.4f}"),
            ("eta_bw", f"{am.eta_bw:.4f}"),
            ("fidelity", f"{am.fidelity:.4f}"),
            ("eta", f"{am.eta:.4f}"),
        ]
    else:
        rows.append(("eta_fw, eta_bw, fidelity, eta", "n/a (closed forms need kappa_a = kappa_b)"))
    return rows


def cmd_analytic(args) -> int:
    preset = STATE_OF_THE_ART if args.preset else None
    params = _params(args, preset)
    rows = _analytic_table(params)
    if args.format == "json":
        _emit(qio.dumps({"params": qio.params_snapshot(params), "results": dict(rows)}), args.out)
    else:
        width = max(len(k) for k, _ in rows)
        _emit("".join(f"{k:<{width}}  {v}\n" for k, v in rows), args.out)
    return EXIT_OK


def cmd_metrics(args) -> int:
    if args.published:
        t = MATRICES[args.published]
    else:
        t = qio.read_matrix_csv(args.matrix)
    try:
        m = metrics(t, Direction(args.direction))
    except ValueError as exc:
        raise qio.ConfigError(str(exc)) from exc
    if args.format == "json":
        _emit(qio.dumps(qio.metrics_dict(m)), args.out)
    else:
        _emit(_summary(m), args.out)
    return EXIT_OK


COMMANDS = {"matrix": cmd_matrix, "scan": cmd_scan, "g2": cmd_g2, "analytic": cmd_analytic, "metrics": cmd_metrics}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (SteadyStateError, EvolutionError) as exc:
        sys.stderr.write(f"solver error: {exc}\n")
        return EXIT_SOLVER
    except (qio.ConfigError, ValueError) as exc:
        sys.stderr.write(f"configuration error: {exc}\n")
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
