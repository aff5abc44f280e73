"""Command-line front end: parameter sweeps written as CSV.

Every CSV starts with ``#`` comment lines echoing the resolved run
configuration, followed by a header row and data rows. Floats carry 17
significant digits. Exit status: 0 success, 1 configuration error,
2 numerical failure (truncation, convergence, failed verification).
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys

import numpy as np

from .errors import InvalidAmplitude, InvalidGain, InvalidModel, NumericalError
from .errormodel import ErrorModel, outcome_table
from .fock import DEFAULT_TAIL_TOL, Truncation, coherent_state
from .heralded import (
    closed_output,
    gain_displaced_number,
    gain_orthogonal_photon_added,
    output_truncation,
    q_zero_location,
    success_probability,
    vanishing_coefficient_index,
)
from .observables import (
    default_window,
    locate_q_zero,
    photon_moments_closed,
    q_function,
    reference_projections,
)

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 1, 2
G0_WARN = 100.0
EXTRA_PANEL_GAIN = 1.195


class ConfigError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def _add_common(p: argparse.ArgumentParser, alpha_default: str) -> None:
    p.add_argument("--alpha-re", type=float, default=None, help=f"Re(alpha) (default {alpha_default})")
    p.add_argument("--alpha-im", type=float, default=0.0, help="Im(alpha)")
    p.add_argument("--dim", type=int, default=None, help="Fock cutoff (default: chosen from |alpha|)")
    p.add_argument("--tail-tol", type=float, default=DEFAULT_TAIL_TOL, help="tolerated top-level mass")
    p.add_argument("--out", default=None, help="output file (default stdout)")
    p.add_argument("--config", default=None, help="flat key=value file mirroring the flags")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="opaherald", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("state", help="Fock coefficients of the output and of |alpha/g>")
    _add_common(p, "sqrt(10)")
    p.add_argument("--gain", type=float, default=None, help="gain g (default g0(alpha))")

    p = sub.add_parser("sweep", help="projections, moments and special points versus gain")
    _add_common(p, "2")
    p.add_argument("--gain-start", type=float, default=1.0)
    p.add_argument("--gain-stop", type=float, default=3.0)
    p.add_argument("--gain-steps", type=int, default=401)
    p.add_argument("--gain-log", action="store_true", help="logarithmic gain spacing")
    p.add_argument("--no-special", action="store_true", help="do not insert g0 and g1 into the sweep")

    p = sub.add_parser("qgrid", help="Q function on a grid for several gains")
    _add_common(p, "2")
    p.add_argument("--gains", default=None, help="comma-separated gains (default 1,g1,g0,1.195)")
    p.add_argument("--half-width", type=float, default=None, help="window half-width (default |alpha|+4)")
    p.add_argument("--nodes", type=int, default=241, help="grid nodes per axis")

    p = sub.add_parser("fidelity", help="fidelity versus dark-count probability")
    _add_common(p, "2")
    p.add_argument("--gain", type=float, default=None, help="gain g (default g0(alpha))")
    p.add_argument("--d-start", type=float, default=0.0)
    p.add_argument("--d-stop", type=float, default=0.5)
    p.add_argument("--d-steps", type=int, default=51)
    p.add_argument("--losses", default="0.0,0.2,0.5", help="comma-separated loss probabilities")

    sub.add_parser("verify", help="run the closed-form vs brute-force cross-checks")
    return parser


def _read_config(path: str) -> dict[str, str]:
    cfg = {}
    try:
        with open(path) as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        cfg[key.replace("_", "-")] = value
    return cfg


def _config_argv(parser: argparse.ArgumentParser, command: str, cfg: dict[str, str]) -> list[str]:
    sub = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction)).choices[command]
    flags = {}
    for action in sub._actions:
        for opt in action.option_strings:
            if opt.startswith("--"):
                flags[opt[2:]] = action
    argv = []
    for key, value in cfg.items():
        if key == "config" or key not in flags:
            raise ConfigError(f"unknown config key {key!r} for {command}")
        if isinstance(flags[key], argparse._StoreTrueAction):
            if value.lower() in ("1", "true", "yes", "on"):
                argv.append(f"--{key}")
            elif value.lower() not in ("0", "false", "no", "off"):
                raise ConfigError(f"config key {key!r} expects a boolean, got {value!r}")
        else:
            argv += [f"--{key}", value]
    return argv


def parse_args(argv: list[str]) -> argparse.Namespace:
    """Parse ``argv``; keys from ``--config`` apply first so explicit flags win."""
    parser = build_parser()
    args = parser.parse_args(argv)
    path = getattr(args, "config", None)
    if path:
        extra = _config_argv(parser, args.command, _read_config(path))
        idx = argv.index(args.command)
        args = parser.parse_args(argv[: idx + 1] + extra + argv[idx + 1 :])
    return args


def _parse_floats(text: str, what: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigError(f"{what}: {exc}") from exc


def _alpha(args, default: float) -> complex:
    re = default if args.alpha_re is None else args.alpha_re
    alpha = complex(re, args.alpha_im)
    if not (math.isfinite(alpha.real) and math.isfinite(alpha.imag)):
        raise ConfigError(f"alpha must be finite, got {alpha}")
    return alpha


def _trunc(args, alpha: complex) -> Truncation:
    try:
        if args.dim is None:
            return output_truncation(alpha, args.tail_tol)
        return Truncation(args.dim, args.tail_tol)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _g0_or_fail(alpha: complex) -> float:
    try:
        g0 = gain_displaced_number(alpha)
    except InvalidAmplitude as exc:
        raise ConfigError(f"default gain g0 needs |alpha| > 1 ({exc}); pass --gain") from exc
    if g0 > G0_WARN:
        print(f"warning: g0={g0:.4g} is very large; truncation demands grow quickly", file=sys.stderr)
    return g0


def gain_grid(start: float, stop: float, steps: int, log: bool) -> np.ndarray:
    if steps < 1:
        raise ConfigError("gain sweep needs at least one step")
    if start < 1.0 or stop < 1.0:
        raise ConfigError("gains must be >= 1")
    if log:
        if start <= 0:
            raise ConfigError("log spacing requires gain-start > 0")
        return np.geomspace(start, stop, steps)
    return np.linspace(start, stop, steps)


class _Writer:
    def __init__(self):
        self.buf = io.StringIO()
        self.csv = csv.writer(self.buf, lineterminator="\n")

    def comment(self, key, value=None):
        text = key if value is None else f"{key} = {value}"
        self.buf.write(f"# {text}\n")

    def row(self, values):
        self.csv.writerow([v if isinstance(v, str) else fmt(v) for v in values])


def _echo(w: _Writer, args, alpha: complex, trunc: Truncation, **extra):
    w.comment(f"opaherald {args.command}")
    w.comment("alpha-re", fmt(alpha.real))
    w.comment("alpha-im", fmt(alpha.imag))
    w.comment("dim", trunc.dim)
    w.comment("tail-tol", fmt(trunc.tail_tol))
    for key, value in extra.items():
        w.comment(key.replace("_", "-"), value)


def cmd_state(args) -> str:
    alpha = _alpha(args, math.sqrt(10.0))
    g = args.gain if args.gain is not None else _g0_or_fail(alpha)
    trunc = _trunc(args, alpha)
    out = closed_output(alpha, g, trunc)
    ref = coherent_state(out.beta, trunc)
    w = _Writer()
    _echo(w, args, alpha, trunc, gain=fmt(g), p_success=fmt(out.p_success))
    w.row(["n", "re_c", "im_c", "abs2_c", "re_ref", "im_ref", "abs2_ref"])
    for n, (c, r) in enumerate(zip(out.psi.amps, ref.amps)):
        w.row([n, c.real, c.imag, abs(c) ** 2, r.real, r.imag, abs(r) ** 2])
    return w.buf.getvalue()


def sweep_rows(alpha: complex, gains, trunc: Truncation):
    for g in gains:
        proj = reference_projections(alpha, g, trunc)
        mom = photon_moments_closed(alpha, g)
        if g > 1.0 and alpha != 0:
            n0 = vanishing_coefficient_index(g)
            zero = q_zero_location(alpha, g)
        else:
            n0, zero = math.inf, complex(math.nan, math.nan)
        yield [
            g, success_probability(alpha, g), proj.p_coh, proj.p_pacs, proj.p_disp,
            mom.mean_n, mom.variance, n0, zero.real, zero.imag,
        ]


def cmd_sweep(args) -> str:
    alpha = _alpha(args, 2.0)
    trunc = _trunc(args, alpha)
    gains = list(gain_grid(args.gain_start, args.gain_stop, args.gain_steps, args.gain_log))
    specials = {}
    if not args.no_special:
        for name, fn in (("g0", gain_displaced_number), ("g1", gain_orthogonal_photon_added)):
            try:
                value = fn(alpha)
            except InvalidAmplitude:
                continue
            specials[name] = value
            if min(gains) <= value <= max(gains):
                gains.append(value)
    gains = sorted(set(gains))
    w = _Writer()
    _echo(
        w, args, alpha, trunc,
        gain_start=fmt(args.gain_start), gain_stop=fmt(args.gain_stop),
        gain_steps=args.gain_steps, gain_log=args.gain_log, no_special=args.no_special,
        **{k: fmt(v) for k, v in specials.items()},
    )
    w.row(["g", "p_success", "p_coh", "p_pacs", "p_disp", "mean_n", "variance", "n0", "q_zero_re", "q_zero_im"])
    for row in sweep_rows(alpha, gains, trunc):
        w.row(row)
    return w.buf.getvalue()


def cmd_qgrid(args) -> str:
    alpha = _alpha(args, 2.0)
    trunc = _trunc(args, alpha)
    if args.gains is None:
        gains = [1.0]
        for fn in (gain_orthogonal_photon_added, gain_displaced_number):
            try:
                gains.append(fn(alpha))
            except InvalidAmplitude:
                pass
        gains.append(EXTRA_PANEL_GAIN)
    else:
        gains = _parse_floats(args.gains, "--gains")
    half = args.half_width if args.half_width is not None else default_window(alpha)[1]
    if not (half > 0 and math.isfinite(half)) or args.nodes < 2:
        raise ConfigError("grid needs a positive finite half-width and at least 2 nodes")
    bounds = (-half, half, -half, half)

    panels = []
    for g in gains:
        psi = closed_output(alpha, g, trunc).psi
        grid = q_function(psi, bounds, args.nodes, args.nodes)
        zero = locate_q_zero(psi, grid) if g > 1.0 else None
        panels.append((g, grid, zero))

    w = _Writer()
    _echo(w, args, alpha, trunc, gains=",".join(fmt(g) for g in gains), half_width=fmt(half), nodes=args.nodes)
    for g, _, zero in panels:
        if zero is not None:
            z, q = zero
            exact = q_zero_location(alpha, g) if alpha != 0 else complex(math.nan, math.nan)
            w.comment(
                f"q-zero g={fmt(g)}: refined {fmt(z.real)} {fmt(z.imag)} Q={fmt(q)}; "
                f"analytic {fmt(exact.real)} {fmt(exact.imag)}"
            )
    w.row(["g", "x", "y", "Q"])
    for g, grid, _ in panels:
        xs, ys = grid.xs, grid.ys
        for iy, y in enumerate(ys):
            for ix, x in enumerate(xs):
                w.row([g, x, y, grid.values[iy, ix]])
    return w.buf.getvalue()


def cmd_fidelity(args) -> str:
    alpha = _alpha(args, 2.0)
    g = args.gain if args.gain is not None else _g0_or_fail(alpha)
    trunc = _trunc(args, alpha)
    if args.d_steps < 1:
        raise ConfigError("--d-steps must be >= 1")
    ds = np.linspace(args.d_start, args.d_stop, args.d_steps)
    losses = _parse_floats(args.losses, "--losses")
    w = _Writer()
    _echo(
        w, args, alpha, trunc, gain=fmt(g), d_start=fmt(args.d_start), d_stop=fmt(args.d_stop),
        d_steps=args.d_steps, losses=",".join(fmt(x) for x in losses),
    )
    w.row(["d", "l", "F_lower", "F_full"])
    base = outcome_table(alpha, g, ErrorModel(0.0, 0.0), trunc)
    for l in losses:  # noqa: E741
        for d in ds:
            model = ErrorModel(d, l)
            lower = full = 0.0
            for (j, k), o in base.outcomes.items():
                term = model.weight(j, k) * o.overlap_sq
                full += term
                if k < 2:
                    lower += term
            w.row([d, l, lower, full])
    return w.buf.getvalue()


def cmd_verify(args) -> tuple[str, bool]:
    from .verify import run_checks

    results = run_checks()
    lines = [r.line() for r in results]
    n_pass = sum(r.passed for r in results)
    lines.append(f"{n_pass}/{len(results)} checks passed")
    return "\n".join(lines) + "\n", n_pass == len(results)


COMMANDS = {"state": cmd_state, "sweep": cmd_sweep, "qgrid": cmd_qgrid, "fidelity": cmd_fidelity}


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = parse_args(argv)
        if args.command == "verify":
            text, ok = cmd_verify(args)
            sys.stdout.write(text)
            return EXIT_OK if ok else EXIT_NUMERICAL
        text = COMMANDS[args.command](args)
        if args.out:
            with open(args.out, "w", newline="") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    except (ConfigError, InvalidGain, InvalidAmplitude, InvalidModel) as exc:
        print(f"opaherald: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"opaherald: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
