"""Command-line front end.

Exit codes: 0 success, 1 tolerance failure, 2 bad arguments, 3 I/O error.
Relative output paths are resolved against ``$NOISYPBT_OUTPUT_DIR`` when it is
set. ``--config FILE`` preloads option defaults from ``key = value`` lines
(keys are option names with dashes or underscores, ``#`` starts a comment);
explicit flags still win.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import warnings
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import __version__
from .bounds import m_low, m_up
from .pauli import PauliChannel, depolarizing, flip_channel, omega
from .pbet import (
    asymptotic_bounds,
    m_bound_pbet,
    m_free,
    pbet_negativity,
    phase_flip_representable,
)
from .pbt import effective_params, entanglement_fidelity, noisy_pbt_channel, q_n, teleportation_fidelity
from .protocol import N_MAX, PortConfig, analytic_choi, simulate_channel_choi
from .search import SampleGrid, boundary_scan, refine_extreme, slice_data, surface_data
from .states import LOW_BOUNDARY_ANGLES, EulerAngles, general_pure_state

EXIT_OK, EXIT_TOLERANCE, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3
SIMULATION_TOL = 1e-8
OUTPUT_DIR_ENV = "NOISYPBT_OUTPUT_DIR"


class UsageError(Exception):
    pass


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def _file_value(v: Any) -> Any:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return f"{v:.17g}"
    return v


def _json_value(v: Any) -> Any:
    if isinstance(v, float) and not math.isfinite(v):
        return None
    return v


def render(records: list[dict], meta: dict, fmt: str) -> str:
    if fmt == "json":
        payload = {
            "meta": meta,
            "records": [{k: _json_value(v) for k, v in r.items()} for r in records],
        }
        return json.dumps(payload, indent=2) + "\n"
    buf = io.StringIO()
    if records:
        writer = csv.DictWriter(buf, fieldnames=list(records[0]), lineterminator="\n")
        writer.writeheader()
        for r in records:
            writer.writerow({k: _file_value(v) for k, v in r.items()})
    return buf.getvalue()


def resolve_output(path: str) -> Path:
    p = Path(path)
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not p.is_absolute():
        p = Path(base) / p
    return p


def write_output(path: str, records: list[dict], meta: dict, fmt: str | None) -> Path:
    out = resolve_output(path)
    if fmt is None:
        fmt = "json" if out.suffix.lower() == ".json" else "csv"
    text = render(records, meta, fmt)
    try:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write {out}: {exc}") from exc
    return out


def parse_noise(args: argparse.Namespace) -> PauliChannel | None:
    given = [x for x in (args.noise, args.depolarizing, args.flip) if x is not None]
    if len(given) > 1:
        raise UsageError("use only one of --noise, --depolarizing, --flip")
    if args.noise is not None:
        parts = args.noise.split(",")
        if len(parts) != 3:
            raise UsageError("--noise expects p1,p2,p3")
        return PauliChannel.from_p(*(float(x) for x in parts))
    if args.depolarizing is not None:
        return depolarizing(args.depolarizing)
    if args.flip is not None:
        parts = args.flip.split(",")
        if len(parts) != 2:
            raise UsageError("--flip expects axis,p")
        return flip_channel(int(parts[0]), float(parts[1]))
    return None


def _theta_and_m0(args: argparse.Namespace) -> tuple[float, float]:
    if args.theta is not None and args.m0 is not None:
        raise UsageError("give either --theta or --m0, not both")
    if args.theta is not None:
        if not 0 <= args.theta <= math.pi / 2:
            raise UsageError("--theta must lie in [0, pi/2]")
        return args.theta, math.sin(args.theta)
    if args.m0 is not None:
        if not 0 <= args.m0 <= 1:
            raise UsageError("--m0 must lie in [0, 1]")
        return math.asin(args.m0), args.m0
    raise UsageError("one of --theta or --m0 is required")


def _meta(command: str, **extra: Any) -> dict:
    return {"command": command, "version": __version__, **extra}


def cmd_fidelity(args: argparse.Namespace) -> int:
    N = args.ports
    noise = parse_noise(args)
    rec: dict[str, Any] = {
        "ports": N,
        "entanglement_fidelity": entanglement_fidelity(N),
        "teleportation_fidelity": teleportation_fidelity(N),
        "q_n": q_n(N),
    }
    if noise is not None:
        ch = noisy_pbt_channel(N, noise)
        e = ch.params
        rec.update(
            q_p=e.q_p,
            q1=e.q1,
            q2=e.q2,
            q3=e.q3,
            noisy_entanglement_fidelity=ch.entanglement_fidelity(),
            noisy_teleportation_fidelity=ch.teleportation_fidelity(),
        )
    for k, v in rec.items():
        print(f"{k}: {_fmt(v) if isinstance(v, float) else v}")
    if args.out:
        write_output(args.out, [rec], _meta("fidelity", noise=list(noise.p) if noise else None), args.format)
    return EXIT_OK


def cmd_bounds(args: argparse.Namespace) -> int:
    omegas = np.linspace(args.omega_min, args.omega_max, args.omega_steps).tolist()
    if args.surface:
        m0s = np.linspace(0.0, 1.0, args.m0_steps).tolist()
        records = surface_data(m0s, omegas)
        meta = _meta("bounds", kind="surface", m0_steps=args.m0_steps, omega_steps=args.omega_steps)
    else:
        _, m0 = _theta_and_m0(args)
        if m0 <= 0:
            raise UsageError("relative bounds need m0 > 0")
        records = slice_data(m0, omegas)
        meta = _meta("bounds", kind="slice", m0=m0, omega_steps=args.omega_steps)
    out = write_output(args.out, records, meta, args.format)
    print(f"wrote {len(records)} rows to {out}")
    return EXIT_OK


def _scan_row(tag: str, angles: EulerAngles, ch: PauliChannel, value: float) -> dict:
    a1, a2, g, b1, b2 = (float(v) for v in angles.as_tuple())
    p1, p2, p3 = ch.p
    return {
        "tag": tag,
        "alpha1": a1,
        "alpha2": a2,
        "gamma": g,
        "beta1": b1,
        "beta2": b2,
        "p1": float(p1),
        "p2": float(p2),
        "p3": float(p3),
        "negativity": float(value),
    }


def cmd_scan(args: argparse.Namespace) -> int:
    theta, m0 = _theta_and_m0(args)
    if not 0 < args.omega <= 4 / 3:
        raise UsageError("--omega must lie in (0, 4/3]")
    grid = SampleGrid(args.n_simplex, args.n_sphere, args.gamma_steps, args.seed)
    extra_a: list[EulerAngles] = []
    extra_c: list[PauliChannel] = []
    if args.inject_boundary:
        extra_a = [LOW_BOUNDARY_ANGLES, EulerAngles()]
        extra_c = [flip_channel(3, args.omega)]
    res = boundary_scan(args.omega, theta, grid, extra_a, extra_c)

    rows = [_scan_row("min", *res.argmin, res.min_value), _scan_row("max", *res.argmax, res.max_value)]
    summary = {
        "min": res.min_value,
        "max": res.max_value,
        "m_low": m_low(m0, args.omega),
        "m_up": m_up(m0, args.omega),
    }
    if args.refine:
        lo = refine_extreme(res.argmin, "min", args.omega, theta)
        hi = refine_extreme(res.argmax, "max", args.omega, theta)
        rows.append(_scan_row("refined_min", *lo.argmin, lo.min_value))
        rows.append(_scan_row("refined_max", *hi.argmax, hi.max_value))
        summary.update(refined_min=lo.min_value, refined_max=hi.max_value)
    assert res.values is not None
    n_c = len(res.channels)
    for s, a in enumerate(res.angles):
        for c in range(n_c):
            rows.append(_scan_row("sample", a, res.channels[c], res.values[s, c]))

    for k, v in summary.items():
        print(f"{k}: {_fmt(v)}")
    if args.out:
        meta = _meta(
            "scan",
            omega=args.omega,
            theta=theta,
            m0=m0,
            seed=args.seed,
            n_simplex=args.n_simplex,
            n_sphere=args.n_sphere,
            gamma_steps=args.gamma_steps,
            summary=summary,
        )
        out = write_output(args.out, rows, meta, args.format)
        print(f"wrote {len(rows)} rows to {out}")
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace) -> int:
    if not 1 <= args.ports <= N_MAX:
        raise UsageError(f"--ports must be in 1..{N_MAX} for the exact simulator")
    noise = parse_noise(args) or PauliChannel.identity()
    cfg = PortConfig(args.ports, noise)
    sim = simulate_channel_choi(cfg)
    ana = analytic_choi(cfg)
    err = float(np.abs(sim - ana).max())
    ok = err < SIMULATION_TOL
    print(f"ports: {args.ports}")
    print(f"noise: {', '.join(_fmt(x) for x in noise.p)}")
    print(f"max_choi_discrepancy: {err:.3e}")
    print("PASS" if ok else "FAIL")
    if args.out:
        p1, p2, p3 = noise.p
        rec = {"ports": args.ports, "p1": p1, "p2": p2, "p3": p3, "max_choi_discrepancy": err, "pass": ok}
        write_output(args.out, [rec], _meta("simulate"), args.format)
    return EXIT_OK if ok else EXIT_TOLERANCE


def cmd_pbet(args: argparse.Namespace) -> int:
    theta, m0 = _theta_and_m0(args)
    N = args.ports
    noise = parse_noise(args) or PauliChannel.identity()
    q_p = effective_params(noise).q_p
    rho = general_pure_state(theta, EulerAngles())
    representable = phase_flip_representable(q_p)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        low = m_bound_pbet(N, q_p, m0, "low")
        up = m_bound_pbet(N, q_p, m0, "up")
    a_low, a_up = asymptotic_bounds(N, omega(noise), m0)
    rec = {
        "ports": N,
        "theta": theta,
        "m0": m0,
        "q_n": q_n(N),
        "q_p": q_p,
        "negativity": pbet_negativity(N, noise, rho),
        "m_free": m_free(N, m0),
        "m_bound_low": low,
        "m_bound_up": up,
        "asymptotic_low": a_low,
        "asymptotic_up": a_up,
        "phase_flip_representable": representable,
    }
    for k, v in rec.items():
        print(f"{k}: {_fmt(v) if isinstance(v, float) else v}")
    if not representable:
        print("note: q_p outside [2/3, 1]; bounds are not validated here", file=sys.stderr)
    if args.out:
        write_output(args.out, [rec], _meta("pbet", noise=list(noise.p)), args.format)
    return EXIT_OK


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _add_noise_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--noise", help="channel probabilities p1,p2,p3 (they sum with p0 to 4)")
    p.add_argument("--depolarizing", type=float, help="depolarizing probability p")
    p.add_argument("--flip", help="single-axis flip as axis,p with axis in 1..3")


def _add_output_flags(p: argparse.ArgumentParser, required: bool = False) -> None:
    p.add_argument("--out", required=required, help="output file (CSV or JSON)")
    p.add_argument("--format", choices=["csv", "json"], help="defaults from the file extension")


def _add_state_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--theta", type=float, help="Schmidt angle in [0, pi/2]")
    p.add_argument("--m0", type=float, help="initial negativity in [0, 1]")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="noisypbt", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("--config", help="key = value file with option defaults")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fidelity", help="exact PBT fidelities, optionally with resource noise")
    p.add_argument("--ports", type=_positive_int, required=True)
    _add_noise_flags(p)
    _add_output_flags(p)
    p.set_defaults(func=cmd_fidelity)

    p = sub.add_parser("bounds", help="closed-form bound tables (slice or surface)")
    _add_state_flags(p)
    p.add_argument("--surface", action="store_true", help="tabulate over an m0 grid instead of one m0")
    p.add_argument("--m0-steps", type=_positive_int, default=21)
    p.add_argument("--omega-min", type=float, default=0.0)
    p.add_argument("--omega-max", type=float, default=2 / 3)
    p.add_argument("--omega-steps", type=_positive_int, default=41)
    _add_output_flags(p, required=True)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("scan", help="Monte Carlo extremal search over states and channels")
    p.add_argument("--omega", type=float, required=True)
    _add_state_flags(p)
    p.add_argument("--n-simplex", type=_positive_int, default=25)
    p.add_argument("--n-sphere", type=_positive_int, default=150)
    p.add_argument("--gamma-steps", type=_positive_int, default=7)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--refine", action="store_true", help="run coordinate refinement from the extremes")
    p.add_argument("--inject-boundary", action="store_true", help="add the known boundary states and phase flip")
    _add_output_flags(p)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("simulate", help="compare the exact protocol simulator with the closed form")
    p.add_argument("--ports", type=_positive_int, required=True)
    _add_noise_flags(p)
    _add_output_flags(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("pbet", help="entanglement teleportation report for one input state")
    p.add_argument("--ports", type=_positive_int, required=True)
    _add_noise_flags(p)
    _add_state_flags(p)
    _add_output_flags(p)
    p.set_defaults(func=cmd_pbet)
    return parser


def read_config(path: str) -> dict[str, str]:
    values: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key = value")
            key, val = (s.strip() for s in line.split("=", 1))
            values[key.replace("-", "_")] = val
    return values


def _apply_config(parser: argparse.ArgumentParser, config: dict[str, str]) -> None:
    for action in parser._subparsers._group_actions:  # type: ignore[union-attr]
        for sp in action.choices.values():
            defaults = {}
            for a in sp._actions:
                if a.dest in config:
                    raw = config[a.dest]
                    if isinstance(a, argparse._StoreTrueAction):
                        defaults[a.dest] = raw.lower() in ("1", "true", "yes", "on")
                    else:
                        defaults[a.dest] = a.type(raw) if a.type else raw
                    a.required = False
            sp.set_defaults(**defaults)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    try:
        if known.config:
            _apply_config(parser, read_config(known.config))
    except (OSError, UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (UsageError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
