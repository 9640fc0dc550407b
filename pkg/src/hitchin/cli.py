"""Command-line front end.

Each subcommand writes one CSV (header row, 17 significant digits, '\\n'
line endings) and prints a short summary. Parameters come from flags, then
an optional ``--config`` key=value file, then built-in defaults. Exit status
is 0 on success, 2 for invalid input and 3 for numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import math
import os
import sys
from pathlib import Path
from typing import Callable

import numpy as np

from . import algebra, liouville, painleve, theta_torus
from .errors import DivergenceError, NumericalError, ValidationError

OUTPUT_ENV = "HITCHIN_OUTPUT_DIR"
EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL = 0, 2, 3
RADIAL_COLUMNS = ("r", "alpha", "dalpha", "sigma", "cumulative_action", "F12", "J_theta")


# name -> (type, default) per command
PARAMS: dict[str, dict[str, tuple[Callable, object]]] = {
    "algebra-check": {"sig": (str, "all")},
    "liouville": {"nu": (float, 1.0), "sign": (str, "top"), "r_min": (float, 1e-3),
                  "r_max": (float, 1e3), "n_points": (int, 600)},
    "sinh": {"a": (float, -4.0), "kappa": (float, 1.0), "sign": (str, "top"),
             "r0": (float, 1e-3), "r_max": (float, 200.0), "tol": (float, 1e-10),
             "samples_per_period": (int, painleve.SAMPLES_PER_PERIOD)},
    "sine": {"a": (float, 3 * math.pi / 4), "kappa": (float, 1.0),
             "r0": (float, 1e-3), "r_max": (float, 200.0), "tol": (float, 1e-10),
             "samples_per_period": (int, painleve.SAMPLES_PER_PERIOD)},
    "torus": {"dataset": (str, "genus1_square"), "nx": (int, 512), "ny": (int, 16)},
}


# -- configuration -------------------------------------------------------------

def read_config(path) -> dict[str, str]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ValidationError(f"cannot read config file {path}: {exc}") from exc
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValidationError(f"{path}:{lineno}: expected key=value")
        key, val = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = val
    return out


def resolve(command: str, flags: dict, config: dict[str, str]) -> dict:
    """Merge flag values over config values over defaults."""
    known = PARAMS[command]
    unknown = set(config) - set(known) - {"output"}
    if unknown:
        raise ValidationError(f"unknown config keys for {command}: {', '.join(sorted(unknown))}")
    params = {}
    for name, (conv, default) in known.items():
        if flags.get(name) is not None:
            params[name] = flags[name]
        elif name in config:
            try:
                params[name] = conv(config[name])
            except ValueError as exc:
                raise ValidationError(f"config value for {name}: {exc}") from exc
        else:
            params[name] = default
    params["output"] = flags.get("output") or config.get("output")
    return params


def output_path(command: str, explicit) -> Path:
    if explicit:
        return Path(explicit)
    base = Path(os.environ.get(OUTPUT_ENV, "."))
    return base / f"{command}.csv"


def write_csv(path: Path, header, columns) -> None:
    """Deterministic numeric CSV: %.17g, '.' separator, '\\n' endings."""
    path.parent.mkdir(parents=True, exist_ok=True)
    data = np.column_stack([np.asarray(c, dtype=float) for c in columns])
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        np.savetxt(fh, data, fmt="%.17g", delimiter=",", newline="\n")


# -- commands ------------------------------------------------------------------

def run_algebra(p: dict, out: Path) -> list[str]:
    sigs = algebra.SIGNATURES if p["sig"] == "all" else [_parse_sig(p["sig"])]
    lines = ["exercises: sl(2) brackets of the real-form generators, Killing form table",
             f"{'signature':<10}{'real form':<10}{'K11':>5}{'K22':>5}{'K33':>5}  brackets"]
    rows = []
    for sig in sigs:
        sig = algebra.RealFormSignature.coerce(sig)
        km = algebra.killing_metric(sig)
        errs = algebra.bracket_table(sig)
        ok = max(errs.values()) < 1e-14
        lines.append(f"{str(tuple(sig)):<10}{sig.name:<10}{km[0]:>5}{km[1]:>5}{km[2]:>5}  "
                     + ("PASS" if ok else "FAIL"))
        rows.append([sig.n1, sig.n2, *km, max(errs.values())])
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", newline="\n") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["n1", "n2", "K11", "K22", "K33", "max_bracket_error"])
        for r in rows:
            w.writerow([*(str(int(v)) for v in r[:5]), f"{r[5]:.17g}"])
    return lines


def _parse_sig(text: str) -> tuple[int, int]:
    try:
        n1, n2 = (int(t) for t in text.replace("(", "").replace(")", "").split(","))
    except ValueError as exc:
        raise ValidationError(f"signature must look like '1,0', got {text!r}") from exc
    return algebra.RealFormSignature.coerce((n1, n2))


def run_liouville(p: dict, out: Path) -> list[str]:
    nu, sign = p["nu"], p["sign"]
    if not nu > 0:
        raise ValidationError("nu must be positive")
    if not 0 < p["r_min"] < p["r_max"] or p["n_points"] < 2:
        raise ValidationError("need 0 < r_min < r_max and n_points >= 2")
    r = np.geomspace(p["r_min"], p["r_max"], p["n_points"])
    with np.errstate(divide="ignore", invalid="ignore"):
        g2 = liouville.g_squared_radial(nu, sign, r)
    a_theta = liouville.connection_coefficient(nu, sign, r)
    write_csv(out, ("r", "g_squared", "a_theta", "F12"), (r, g2, a_theta, -g2))
    act = liouville.reduced_action(nu, sign)
    lines = ["exercises: Hitchin equations in the ansatz reduction, Liouville equation, "
             "flux quantisation, reduced action"]
    if sign == "top":
        lines.append(f"flux analytic   = {liouville.flux(nu):.12g}  (-4 pi nu)")
        lines.append(f"flux quadrature = {liouville.flux(nu, numerical=True):.12g}")
    else:
        lines.append("flux: bottom sign has a pole on |xi| = 1; no finite flux")
    if act.regular:
        lines.append(f"S' = {act.value:.3g}")
    else:
        lines.append("S' not defined: solution is singular on the integration range")
    return lines


def _radial(kind: str, p: dict, out: Path) -> list[str]:
    if p["samples_per_period"] < 4:
        raise ValidationError("samples_per_period must be at least 4")
    prob = painleve.RadialProblem(kind=kind, sign=p.get("sign", "top"), kappa=p["kappa"],
                                  a=p["a"], r0=p["r0"], r_max=p["r_max"], tol=p["tol"])
    sol = painleve.integrate(prob, p["samples_per_period"])
    cols = sol.columns()
    write_csv(out, RADIAL_COLUMNS, [cols[c] for c in RADIAL_COLUMNS])
    eq = "radial sinh-Gordon" if kind == "sinh" else "radial sine-Gordon"
    lines = [f"exercises: {eq} equation, Painleve III form, action density and current"]
    lines.append(f"Painleve III residual (max) = {painleve.painleve_residual(sol):.3g}")
    if kind == "sinh" and prob.sign == "top":
        if prob.kappa * prob.r_max >= 50:
            fit = painleve.fit_tail(sol)
            exact = painleve.exact_asymptotics(prob.a, prob.kappa)
            lines.append(f"tail fit     c = {fit.c:.6f}  theta0 = {fit.theta0:.6f}")
            lines.append(f"closed form  c = {exact.c:.6f}  theta0 = {exact.theta0:.6f}")
        else:
            lines.append("tail fit skipped: kappa r_max < 50")
        amp, freq = painleve.tail_oscillation(sol)
        lines.append(f"action bracket oscillation: amplitude {amp:.4g}, frequency {freq:.6f}"
                     f" (2 kappa = {2 * prob.kappa:g})")
    else:
        tail = np.abs(sol.alpha[sol.r >= prob.r_max / 2]).max()
        lines.append(f"max |alpha| on [r_max/2, r_max] = {tail:.6g}")
    lines.append(f"cumulative action at r_max = {cols['cumulative_action'][-1]:.6g}")
    return lines


def run_sinh(p: dict, out: Path) -> list[str]:
    return _radial("sinh", p, out)


def run_sine(p: dict, out: Path) -> list[str]:
    return _radial("sine", p, out)


def run_torus(p: dict, out: Path) -> list[str]:
    name = p["dataset"]
    if name in theta_torus.BUNDLED:
        data = theta_torus.bundled_dataset(name)
    else:
        data = theta_torus.read_spectral_data(name)
    grid = theta_torus.sample_solution(data, p["nx"], p["ny"])
    write_csv(out, ("x", "y", "alpha", "residual"),
              (grid.x.ravel(), grid.y.ravel(), grid.alpha.ravel(), grid.residual.ravel()))
    rep = theta_torus.validate_dataset(data, p["nx"], p["ny"])
    return [
        "exercises: elliptic sinh-Gordon equation on a torus, theta-function solution",
        f"dataset {data.name}: genus {data.genus}, kappa {data.kappa:g}",
        f"reality defect     = {rep.reality:.3g}",
        f"periodicity defect = {rep.periodicity:.3g}",
        f"PDE residual (max) = {rep.residual:.3g}",
        "checks: " + ("PASS" if rep.passed() else "FAIL"),
    ]


RUNNERS = {"algebra-check": run_algebra, "liouville": run_liouville,
           "sinh": run_sinh, "sine": run_sine, "torus": run_torus}


# -- argument parsing ----------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hitchin",
        description="Construct and verify solutions of the reduced self-dual Yang-Mills equations.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="key=value file; flags take precedence")
        sp.add_argument("-o", "--output",
                        help=f"CSV path (default: ${OUTPUT_ENV} or '.', file <command>.csv)")

    sp = sub.add_parser("algebra-check", help="bracket and Killing-form checks")
    sp.add_argument("--sig", help="signature 'n1,n2' or 'all'")
    common(sp)

    sp = sub.add_parser("liouville", help="axisymmetric Liouville family")
    sp.add_argument("--nu", type=float)
    sp.add_argument("--sign", choices=("top", "bottom"))
    sp.add_argument("--r-min", dest="r_min", type=float)
    sp.add_argument("--r-max", dest="r_max", type=float)
    sp.add_argument("--n-points", dest="n_points", type=int)
    common(sp)

    for kind in ("sinh", "sine"):
        sp = sub.add_parser(kind, help=f"radial {kind}-Gordon profile")
        sp.add_argument("--a", type=float, help="alpha(0)")
        sp.add_argument("--kappa", type=float)
        if kind == "sinh":
            sp.add_argument("--sign", choices=("top", "bottom"))
        sp.add_argument("--r0", type=float)
        sp.add_argument("--r-max", dest="r_max", type=float)
        sp.add_argument("--tol", type=float)
        sp.add_argument("--samples-per-period", dest="samples_per_period", type=int)
        common(sp)

    sp = sub.add_parser("torus", help="doubly periodic theta-function solution")
    sp.add_argument("--dataset", help=f"file path or one of {', '.join(theta_torus.BUNDLED)}")
    sp.add_argument("--nx", type=int)
    sp.add_argument("--ny", type=int)
    common(sp)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    flags = vars(args)
    command = flags.pop("command")
    try:
        config = read_config(flags["config"]) if flags.get("config") else {}
        params = resolve(command, flags, config)
        out = output_path(command, params["output"])
        lines = RUNNERS[command](params, out)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except DivergenceError as exc:
        radius = "unknown" if exc.radius is None else f"{exc.radius:.6g}"
        print(f"divergence: {exc} (blow-up radius {radius})", file=sys.stderr)
        return EXIT_NUMERICAL
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    print(f"[{command}]")
    for line in lines:
        print("  " + line)
    print(f"  wrote {out}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
