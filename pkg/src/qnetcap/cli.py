"""Command-line front end: JSON in, JSON or CSV out, stable exit codes.

Commands: generate (lattice patch to network JSON), validate (structural
checks), analyze (six-number capacity report plus min-cut), threshold
(bracketed tolerable-parameter solve, with connectivity constants and nodal
density), sweep (CSV tables over one variable), selftest (randomized oracle
batteries with a fixed seed).

Exit codes: 0 ok, 2 input error, 3 validation failure, 4 unattainable target,
5 internal numeric failure. Given identical inputs all output files are
byte-identical.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
from fractions import Fraction

import numpy as np

from . import qkd as qkd_mod
from . import wrn
from .channels import AmplitudeDamping, ThermalLoss, as_thermal, channel_from_json
from .errors import (
    DomainError,
    MonotonicityError,
    NotAttainableError,
    QnetcapError,
    ValidationError,
)
from .network import apply_split, load_network, network_to_json
from .routing import capacity_report, cut_to_json, max_flow
from .selfcheck import check_ad_compounds, check_tl_compounds, routing_errors

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_VALIDATION = 3
EXIT_NOT_ATTAINABLE = 4
EXIT_NUMERIC = 5

# Lattice family defaults when a spec omits one: the triangular cell is the
# qubit scenario, the diagonal-square cell the bosonic one.
DEFAULT_FAMILY = {"triangular6": "ad", "manhattan8": "tl"}

SWEEP_SCHEMA = "qnetcap-sweep/1"

_PARAM_BY_FLAG = {
    "edge-length": wrn.PARAM_EDGE_LENGTH,
    "internal-loss": wrn.PARAM_INTERNAL_LOSS,
    "receiver-noise": wrn.PARAM_RECEIVER_NOISE,
}

_WRN_KEYS = {
    "cell", "radius", "edge_length_km", "family", "gamma", "nbar_B",
    "recv", "send", "qkd_setup",
}

_SWEEP_KEYS = {"variable", "start", "stop", "steps", "scale", "wrn", "target", "param", "qkd_setup"}

_SWEEP_VARIABLES = ("edgeLength", "internalLoss", "receiverNoise", "targetCapacity")


class _InputError(Exception):
    pass


def _read_json(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise _InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise _InputError(f"{path} is not valid JSON: {exc}") from exc


def _emit(text: str, out_path: str | None) -> None:
    if out_path is None:
        sys.stdout.write(text)
        return
    try:
        with open(out_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise _InputError(f"cannot write {out_path}: {exc}") from exc


def _emit_json(obj, out_path: str | None) -> None:
    _emit(json.dumps(obj, indent=2) + "\n", out_path)


def _error(kind: str, message: str, **extra) -> None:
    payload = {"error": kind, "message": message}
    payload.update(extra)
    sys.stderr.write(json.dumps(payload) + "\n")


def _parse_qkd_setup(data) -> qkd_mod.QkdSetup:
    if isinstance(data, str):
        return qkd_mod.from_preset(data)
    if not isinstance(data, dict):
        raise _InputError(f"qkd_setup must be a preset name or an object, got {type(data).__name__}")
    fields = dict(data)
    preset = fields.pop("preset", None)
    base = qkd_mod.from_preset(preset) if preset is not None else qkd_mod.QkdSetup()
    known = {f.name for f in dataclasses.fields(qkd_mod.QkdSetup)}
    unknown = sorted(set(fields) - known)
    if unknown:
        raise _InputError(f"unknown qkd_setup keys: {', '.join(unknown)}")
    return dataclasses.replace(base, **fields)


def _parse_wrn_spec(data) -> tuple[wrn.WrnSpec, qkd_mod.QkdSetup | None]:
    if not isinstance(data, dict):
        raise _InputError("lattice spec must be a JSON object")
    unknown = sorted(set(data) - _WRN_KEYS)
    if unknown:
        raise _InputError(f"unknown lattice spec keys: {', '.join(unknown)}")
    for key in ("cell", "radius", "edge_length_km"):
        if key not in data:
            raise _InputError(f"lattice spec is missing {key!r}")
    cell = data["cell"]
    family = data.get("family", DEFAULT_FAMILY.get(cell))
    if family is None:
        raise _InputError(f"unknown cell {cell!r}; declare family explicitly")
    kwargs = {
        "cell_type": cell,
        "radius": int(data["radius"]),
        "edge_length_km": float(data["edge_length_km"]),
        "family": family,
    }
    if "gamma" in data:
        kwargs["gamma"] = float(data["gamma"])
    if "nbar_B" in data:
        kwargs["nbar_B"] = float(data["nbar_B"])
    for side in ("recv", "send"):
        if side in data:
            kwargs[side] = channel_from_json(data[side])
    setup = _parse_qkd_setup(data["qkd_setup"]) if "qkd_setup" in data else None
    return wrn.WrnSpec(**kwargs), setup


def cmd_generate(args) -> int:
    family = args.family or DEFAULT_FAMILY[args.cell]
    spec = wrn.WrnSpec(
        cell_type=args.cell,
        radius=args.radius,
        edge_length_km=args.d,
        family=family,
        gamma=args.gamma,
        nbar_B=args.nbar_b,
    )
    graph = wrn.generate(spec)
    _emit_json(network_to_json(graph), args.out)
    return EXIT_OK


def cmd_validate(args) -> int:
    data = _read_json(getattr(args, "in"))
    _, violations = load_network(data)
    _emit_json({"violations": violations}, args.out)
    return EXIT_OK if not violations else EXIT_VALIDATION


def cmd_analyze(args) -> int:
    data = _read_json(getattr(args, "in"))
    graph, violations = load_network(data)
    if violations or graph is None:
        _error("validation", "network failed validation", violations=violations)
        return EXIT_VALIDATION
    bg = apply_split(graph)
    report = capacity_report(bg)
    upper_flow = max_flow(bg, "upper")
    out = {
        "users": list(bg.users),
        "report": report.as_dict(),
        "mincut": {"value": upper_flow.value, **cut_to_json(upper_flow.mincut)},
    }
    _emit_json(out, args.out)
    return EXIT_OK


def _rho_min_entry(bracket: tuple[float, float], cell_type: str) -> dict:
    d_lo, d_hi = bracket
    mid = 0.5 * (d_lo + d_hi)
    return {
        "bracket": [
            wrn.min_nodal_density(d_hi, cell_type).rho_min,
            wrn.min_nodal_density(d_lo, cell_type).rho_min,
        ],
        "midpoint": wrn.min_nodal_density(mid, cell_type).rho_min,
    }


def cmd_threshold(args) -> int:
    spec, setup = _parse_wrn_spec(_read_json(args.spec))
    param = _PARAM_BY_FLAG[args.param]
    bulk, user = wrn.threshold_report(spec, args.target, param, qkd_setup=setup)
    delta_val, omega_val = wrn.connectivity(spec)
    out = {
        "cell": spec.cell_type,
        "k": spec.k,
        "delta": delta_val,
        "omega": f"{omega_val.numerator}/{omega_val.denominator}",
        "omega_value": float(omega_val),
        "param": param,
        "target": args.target,
        "bulk": bulk.as_json(),
        "user": user.as_json(),
    }
    if param == wrn.PARAM_EDGE_LENGTH:
        out["rho_min"] = _rho_min_entry(bulk.bracket, spec.cell_type)
    _emit_json(out, args.out)
    return EXIT_OK


def _sweep_points(spec: dict) -> list[float]:
    steps = spec["steps"]
    if not isinstance(steps, int) or steps < 2:
        raise _InputError(f"steps must be an integer >= 2, got {steps!r}")
    start, stop = float(spec["start"]), float(spec["stop"])
    if not start < stop:
        raise _InputError(f"sweep range needs start < stop, got [{start}, {stop}]")
    scale = spec.get("scale", "linear")
    if scale == "linear":
        xs = np.linspace(start, stop, steps)
    elif scale == "log":
        if start <= 0.0:
            raise _InputError(f"log sweeps need positive endpoints, got start={start}")
        xs = np.geomspace(start, stop, steps)
    else:
        raise _InputError(f"scale must be 'linear' or 'log', got {scale!r}")
    return [float(x) for x in xs]


def _solve_both(spec, target, param, setup) -> tuple[float, float]:
    """Bulk-scale threshold from each bounding function; nan marks unattainable."""
    lower_fn, upper_fn, bracket = wrn.bound_functions(spec, param, qkd_setup=setup)
    scale = float(wrn.delta(spec.k, spec.commonalities))
    out = []
    for fn in (lower_fn, upper_fn):
        try:
            out.append(wrn.solve_threshold(fn, target, scale, bracket=bracket))
        except NotAttainableError:
            out.append(math.nan)
    return out[0], out[1]


def _fmt(x: float) -> str:
    return repr(float(x))


def _rho_cells(d_star: float, cell_type: str) -> float:
    if math.isnan(d_star):
        return math.nan
    return wrn.min_nodal_density(d_star, cell_type).rho_min


def _sweep_rows(data: dict, spec: wrn.WrnSpec, setup) -> tuple[list[str], list[list[float]]]:
    variable = data["variable"]
    points = _sweep_points(data)
    if variable == "targetCapacity":
        param = data.get("param", wrn.PARAM_EDGE_LENGTH)
        if param not in (wrn.PARAM_EDGE_LENGTH, wrn.PARAM_INTERNAL_LOSS, wrn.PARAM_RECEIVER_NOISE):
            raise _InputError(f"unknown param {param!r}")
        names = {
            wrn.PARAM_EDGE_LENGTH: ("d_max_lower", "d_max_upper"),
            wrn.PARAM_INTERNAL_LOSS: ("p_int_max_lower", "p_int_max_upper"),
            wrn.PARAM_RECEIVER_NOISE: ("nbar_r_max_lower", "nbar_r_max_upper"),
        }[param]
        header = ["target_capacity", *names]
        with_rho = param == wrn.PARAM_EDGE_LENGTH
        if with_rho:
            header += ["rho_min_lower", "rho_min_upper"]
        rows = []
        for target in points:
            lo, up = _solve_both(spec, target, param, setup)
            row = [target, lo, up]
            if with_rho:
                row += [_rho_cells(lo, spec.cell_type), _rho_cells(up, spec.cell_type)]
            rows.append(row)
        return header, rows

    if "target" not in data:
        raise _InputError(f"sweeps over {variable} need a fixed 'target' capacity")
    target = float(data["target"])

    if variable == "edgeLength":
        if spec.family == "ad":
            header = ["edge_length_km", "p_int_max_lower", "p_int_max_upper"]
            rows = []
            for d in points:
                at_d = dataclasses.replace(spec, edge_length_km=d)
                lo, up = _solve_both(at_d, target, wrn.PARAM_INTERNAL_LOSS, setup)
                rows.append([d, lo, up])
            return header, rows
        base = setup if setup is not None else qkd_mod.from_preset("table1-heterodyne-llo")
        llo = qkd_mod.with_scheme(base, "llo")
        tlo = qkd_mod.with_scheme(base, "tlo")
        header = [
            "edge_length_km", "nbar_r_max_lower", "nbar_r_max_upper", "nbar_r_llo", "nbar_r_tlo",
        ]
        rows = []
        for d in points:
            at_d = dataclasses.replace(spec, edge_length_km=d)
            lo, up = _solve_both(at_d, target, wrn.PARAM_RECEIVER_NOISE, None)
            eta = 10.0 ** (-spec.gamma * d)
            rows.append([
                d, lo, up,
                qkd_mod.receiver_noise(llo, eta),
                qkd_mod.receiver_noise(tlo, eta),
            ])
        return header, rows

    if variable == "internalLoss":
        if spec.family != "ad":
            raise _InputError("internalLoss sweeps need a damping-family lattice")
        header = ["p_int", "d_max_lower", "d_max_upper", "rho_min_lower", "rho_min_upper"]
        rows = []
        for p_int in points:
            at_p = dataclasses.replace(spec, recv=AmplitudeDamping(p_int))
            lo, up = _solve_both(at_p, target, wrn.PARAM_EDGE_LENGTH, setup)
            rows.append([p_int, lo, up, _rho_cells(lo, spec.cell_type), _rho_cells(up, spec.cell_type)])
        return header, rows

    if variable == "receiverNoise":
        if spec.family != "tl":
            raise _InputError("receiverNoise sweeps need a thermal-family lattice")
        tau_r = as_thermal(spec.recv)[0]
        header = ["nbar_r", "d_max_lower", "d_max_upper", "rho_min_lower", "rho_min_upper"]
        rows = []
        for nbar_r in points:
            at_n = dataclasses.replace(spec, recv=ThermalLoss(tau_r, nbar_r))
            lo, up = _solve_both(at_n, target, wrn.PARAM_EDGE_LENGTH, setup)
            rows.append([nbar_r, lo, up, _rho_cells(lo, spec.cell_type), _rho_cells(up, spec.cell_type)])
        return header, rows

    raise _InputError(f"variable must be one of {_SWEEP_VARIABLES}, got {variable!r}")


def cmd_sweep(args) -> int:
    data = _read_json(args.spec)
    if not isinstance(data, dict):
        raise _InputError("sweep spec must be a JSON object")
    unknown = sorted(set(data) - _SWEEP_KEYS)
    if unknown:
        raise _InputError(f"unknown sweep spec keys: {', '.join(unknown)}")
    for key in ("variable", "start", "stop", "steps", "wrn"):
        if key not in data:
            raise _InputError(f"sweep spec is missing {key!r}")
    if data["variable"] not in _SWEEP_VARIABLES:
        raise _InputError(f"variable must be one of {_SWEEP_VARIABLES}, got {data['variable']!r}")
    spec, file_setup = _parse_wrn_spec(data["wrn"])
    setup = _parse_qkd_setup(data["qkd_setup"]) if "qkd_setup" in data else file_setup
    header, rows = _sweep_rows(data, spec, setup)
    lines = [
        f"# {SWEEP_SCHEMA}",
        f"# variable={data['variable']} cell={spec.cell_type} family={spec.family} "
        f"radius={spec.radius} scale=delta",
        ",".join(header),
    ]
    for row in rows:
        lines.append(",".join(_fmt(x) for x in row))
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_selftest(args) -> int:
    rng = np.random.default_rng(args.seed)
    checks = [
        ("ad-compound-vs-kraus", check_ad_compounds(rng, args.count), 1e-12),
        ("tl-compound-vs-gaussian", check_tl_compounds(rng, args.count), 1e-12),
    ]
    flow_err, widest_err = routing_errors(rng, args.count, max_nodes=8)
    checks.append(("max-flow-vs-cut-enumeration", flow_err, 1e-9))
    checks.append(("widest-path-vs-enumeration", widest_err, 0.0))
    failed = False
    for name, worst, tol in checks:
        ok = worst <= tol
        failed = failed or not ok
        print(f"{'PASS' if ok else 'FAIL'} {name}: worst deviation {worst:.3e} (tol {tol:g})")
    return EXIT_OK if not failed else EXIT_NUMERIC


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qnetcap",
        description="Capacity bounds for quantum repeater networks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="emit a lattice patch as network JSON")
    gen.add_argument("--cell", required=True, choices=sorted(DEFAULT_FAMILY))
    gen.add_argument("--radius", required=True, type=int)
    gen.add_argument("--d", required=True, type=float, help="edge length in km")
    gen.add_argument("--family", choices=("ad", "tl"))
    gen.add_argument("--gamma", type=float, default=0.02)
    gen.add_argument("--nbar-b", type=float, default=0.002)
    gen.add_argument("--out")
    gen.set_defaults(func=cmd_generate)

    val = sub.add_parser("validate", help="structural checks on a network JSON")
    val.add_argument("--in", required=True)
    val.add_argument("--out")
    val.set_defaults(func=cmd_validate)

    ana = sub.add_parser("analyze", help="six-number capacity report plus min-cut")
    ana.add_argument("--in", required=True)
    ana.add_argument("--out")
    ana.set_defaults(func=cmd_analyze)

    thr = sub.add_parser("threshold", help="bracketed tolerable-parameter solve")
    thr.add_argument("--spec", required=True)
    thr.add_argument("--target", required=True, type=float)
    thr.add_argument("--param", required=True, choices=sorted(_PARAM_BY_FLAG))
    thr.add_argument("--out")
    thr.set_defaults(func=cmd_threshold)

    swp = sub.add_parser("sweep", help="CSV table over one swept variable")
    swp.add_argument("--spec", required=True)
    swp.add_argument("--out")
    swp.set_defaults(func=cmd_sweep)

    st = sub.add_parser("selftest", help="randomized oracle batteries")
    st.add_argument("--seed", type=int, default=0)
    st.add_argument("--count", type=int, default=30)
    st.set_defaults(func=cmd_selftest)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _InputError as exc:
        _error("input", str(exc))
        return EXIT_INPUT
    except ValidationError as exc:
        _error("validation", str(exc), violations=exc.violations)
        return EXIT_VALIDATION
    except NotAttainableError as exc:
        _error("not-attainable", str(exc))
        return EXIT_NOT_ATTAINABLE
    except MonotonicityError as exc:
        _error("numeric", str(exc))
        return EXIT_NUMERIC
    except QnetcapError as exc:
        _error("input", str(exc))
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
