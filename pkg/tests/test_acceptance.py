"""Acceptance suite: one test and one printed PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py -v`` (lines are printed even
without ``-s``) or directly as a script.
"""

import math
import sys
import time

import numpy as np
import pytest

from hitchin import algebra, cli, fields, liouville, painleve, theta_torus
from hitchin.errors import DivergenceError, IntegralityError
from hitchin.painleve import RadialProblem


@pytest.fixture
def report(capsys):
    def emit(number: int, ok: bool, detail: str):
        with capsys.disabled():
            print(f"\n[criterion {number}] {'PASS' if ok else 'FAIL'}: {detail}")
        assert ok, detail
    return emit


def test_criterion_1_algebra(report):
    t0 = time.perf_counter()
    worst = 0.0
    table_ok = True
    for sig in algebra.SIGNATURES:
        worst = max(worst, max(algebra.bracket_table(sig).values()))
        s = algebra.RealFormSignature.coerce(sig)
        expect = np.diag([s.eps2, s.eps1, s.eps1 * s.eps2])
        worst = max(worst, float(np.abs(algebra.trace_form(sig) - expect).max()))
        table_ok &= algebra.killing_metric(sig) == tuple(expect.diagonal())
    dt = time.perf_counter() - t0
    report(1, worst < 1e-14 and table_ok and dt < 1.0,
           f"max bracket/Killing error {worst:.2e} (< 1e-14), runtime {dt:.3f} s (< 1 s)")


def test_criterion_2_liouville(report):
    t0 = time.perf_counter()
    rng = np.random.default_rng(11)
    r = rng.uniform(0.1, 3.0, 100)
    th = rng.uniform(-np.pi, np.pi, 100)
    x, y = r * np.cos(th), r * np.sin(th)
    worst_h = worst_b = worst_flux = worst_s = 0.0
    for nu in (1, 2, 3):
        f = liouville.hitchin_pair_polar(nu, "top")
        worst_h = max(worst_h, fields.hitchin_residual(f, (x, y)).max_abs())
        worst_b = max(worst_b, max(fields.flat_connection_residual(f, (xi, yi)) for xi, yi in zip(x, y)))
        num = liouville.flux(nu, numerical=True)
        worst_flux = max(worst_flux, abs(num + 4 * np.pi * nu) / (4 * np.pi * nu))
        worst_s = max(worst_s, abs(liouville.reduced_action(nu, "top").value))
    dt = time.perf_counter() - t0
    ok = worst_h < 1e-8 and worst_b < 1e-8 and worst_flux < 1e-6 and worst_s < 1e-8 and dt < 10
    report(2, ok, f"Hitchin residual {worst_h:.1e}, flatness {worst_b:.1e} (< 1e-8); "
                  f"flux rel. error {worst_flux:.1e} (< 1e-6); |S'| {worst_s:.1e}; runtime {dt:.2f} s (< 10 s)")


def test_criterion_3_patching(report):
    errs = [liouville.patch_transition_error(nu, r=1.0) for nu in (1, 2)]
    rejected = 0
    for nu in (0.5, 1.5, 2.7):
        try:
            liouville.patch_pair(nu)
        except IntegralityError:
            rejected += 1
    report(3, max(errs) < 1e-10 and rejected == 3,
           f"patch mismatch at r=1: nu=1 {errs[0]:.1e}, nu=2 {errs[1]:.1e} (< 1e-10); "
           f"non-integer nu rejected {rejected}/3")


@pytest.mark.parametrize("a,kappa", [(-4.0, 1.0), (-1.0, 1.0), (1.0, 2.0)])
def test_criterion_4_connection_formula(report, a, kappa):
    t0 = time.perf_counter()
    sol = painleve.integrate(RadialProblem(a=a, kappa=kappa, r_max=200.0))
    fit = painleve.fit_tail(sol)
    exact = painleve.exact_asymptotics(a, kappa)
    c2_rel = abs(fit.c**2 - exact.c**2) / exact.c**2
    c_rel = abs(fit.c - exact.c) / exact.c
    dth = abs((fit.theta0 - exact.theta0 + math.pi) % (2 * math.pi) - math.pi)
    _, freq = painleve.tail_oscillation(sol)
    f_rel = abs(freq - 2 * kappa) / (2 * kappa)
    dt = time.perf_counter() - t0
    ok = max(c_rel, c2_rel) < 0.02 and dth < 0.1 and f_rel < 0.01 and dt < 30
    report(4, ok, f"(a, kappa) = ({a:g}, {kappa:g}): c {fit.c:.4f} vs {exact.c:.4f} "
                  f"(rel {c_rel:.2%}, c^2 rel {c2_rel:.2%}; < 2%), theta0 {fit.theta0:.4f} vs "
                  f"{exact.theta0:.4f} (|d| {dth:.3f} < 0.1), bracket frequency {freq:.4f} "
                  f"(rel {f_rel:.2%} < 1%), runtime {dt:.2f} s (< 30 s)")


def test_criterion_5_su2_triviality(report):
    radii = {}
    for a in (0.5, -0.5, 2.0, -2.0):
        try:
            painleve.integrate(RadialProblem(sign="bottom", a=a))
            radii[a] = None
        except DivergenceError as exc:
            radii[a] = exc.radius
    diverged = all(r is not None and r < 50.0 for r in radii.values())
    trivial = painleve.integrate(RadialProblem(sign="bottom", a=0.0))
    zero = bool(np.all(trivial.alpha == 0.0))
    listing = ", ".join(f"a={a:g}: r={r:.3f}" if r is not None else f"a={a:g}: none"
                        for a, r in radii.items())
    report(5, diverged and zero,
           f"divergence radii {listing} (< 50/kappa); a=0 identically zero: {zero}")


def test_criterion_6_painleve(report):
    cases = [RadialProblem(), RadialProblem(a=-1.0), RadialProblem(a=1.0, kappa=2.0),
             RadialProblem(kind="sine", a=3 * math.pi / 4)]
    ratios = []
    for p in cases:
        ratios.append(painleve.painleve_residual(painleve.integrate(p)) / p.tol)
    report(6, max(ratios) < 100,
           "max Painleve III residual / tol: " + ", ".join(f"{q:.1f}" for q in ratios) + " (< 100)")


def test_criterion_7_sine_nonlocalisation(report, tmp_path):
    outs = {}
    for kind, a in (("sinh", "-4"), ("sine", str(3 * math.pi / 4))):
        outs[kind] = tmp_path / f"{kind}.csv"
        assert cli.main([kind, "--a", a, "--kappa", "1", "-o", str(outs[kind])]) == 0
    cols = {k: v.read_text().split("\n", 1)[0].split(",") for k, v in outs.items()}
    have_j = all("J_theta" in c for c in cols.values())
    data = np.loadtxt(outs["sine"], delimiter=",", skiprows=1)
    r, alpha = data[:, 0], np.abs(data[:, 1])
    far = alpha[(r >= 100) & (r <= 200)].max()
    near = alpha[(r >= 1) & (r <= 10)].max()
    report(7, far >= 0.5 * near and have_j,
           f"sine max|alpha| on [100,200] {far:.4f} vs 0.5 x max on [1,10] {0.5 * near:.4f}; "
           f"J_theta emitted for both: {have_j}")


def test_criterion_8_torus(report):
    # libration oracle
    res = []
    for n in (128, 256, 512):
        alpha, lattice = theta_torus.libration_oracle(0.1, 1.0, n).on_lattice(16)
        res.append(theta_torus.pde_residual_grid(alpha, 1.0, lattice))
    orders = [math.log2(res[0] / res[1]), math.log2(res[1] / res[2])]
    lib_ok = res[1] < 1e-5 and all(1.8 < o < 2.2 for o in orders)

    # theta identities for a genus-2 matrix
    B = np.array([[1.1j + 0.2, 0.3 - 0.1j], [0.3 - 0.1j, 0.9j - 0.4]])
    rng = np.random.default_rng(5)
    z = rng.normal(size=(25, 2)) * 0.4 + 1j * rng.normal(size=(25, 2)) * 0.2
    base = theta_torus.riemann_theta(z, B)
    ident = 0.0
    for j in range(2):
        e = np.eye(2)[j]
        ident = max(ident, float(np.max(np.abs(theta_torus.riemann_theta(z + e, B) - base) / np.abs(base))))
        factor = np.exp(-2j * np.pi * (z[:, j] + B[j, j] / 2))
        quasi = theta_torus.riemann_theta(z + B @ e, B)
        ident = max(ident, float(np.max(np.abs(quasi - factor * base) / np.abs(factor * base))))

    reps = [theta_torus.validate_dataset(theta_torus.bundled_dataset(n)) for n in theta_torus.BUNDLED]
    data_ok = all(r.passed() for r in reps)
    detail = "; ".join(f"{r.name}: Im {r.reality:.1e}, period {r.periodicity:.1e}, residual {r.residual:.1e}"
                       for r in reps)
    report(8, lib_ok and ident < 1e-10 and data_ok,
           f"libration residual 256x16 {res[1]:.2e} (< 1e-5), orders {orders[0]:.2f}/{orders[1]:.2f}; "
           f"theta identities {ident:.1e} (< 1e-10); {detail}")


def test_criterion_9_reproducibility(report, tmp_path):
    same = []
    for argv in (["sinh"], ["sine", "--r-max", "100"], ["torus", "--nx", "64"], ["liouville"]):
        blobs = []
        for k in range(2):
            out = tmp_path / f"{argv[0]}_{k}.csv"
            assert cli.main([*argv, "-o", str(out)]) == 0
            blobs.append(out.read_bytes())
        same.append(blobs[0] == blobs[1])
    report(9, all(same), f"byte-identical CSV on repeat: {sum(same)}/{len(same)} commands")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
