"""Acceptance battery: one test per shipping criterion.

Each test prints a single "criterion NN (<name>): PASS/FAIL" line (visible
with ``pytest -s`` and on failures), pins its tolerances explicitly, and
asserts its own runtime budget.  Expected values are either closed-form,
independently derived oracles, or frozen regression values from the first
verified run; nothing here is tuned to the implementation under test.
"""

import json
import math
import time

import numpy as np
import pytest

from semireg import zoo
from semireg.cli import main
from semireg.cosine import (cosine_from_generator, cosine_from_group,
                            dalembert_residual, fattorini_series,
                            zero_two_profile)
from semireg.discpoly import (Polynomial, bernstein_check, disc_norm,
                              eval_matrix, normalize_peak, power_expand)
from semireg.interp import (InterpolationTriple, KernelSpec,
                            extrapolation_bench, gaussian_apply,
                            gaussian_kernel, gaussian_square_function_bench,
                            kernel_mass_defect, lp_logconvexity_check,
                            maximal_domination_check, riesz_thorin_check)
from semireg.linalg import ContourSpec, mat_exp, op_norm
from semireg.rbound import (RademacherConfig, bt_contour_check,
                            kahane_contraction_check, r_converse_bound_eval,
                            r_sector_report, rademacher_norm, rbound_estimate,
                            sector_family_estimate, square_function_norm)
from semireg.semigroup import (beurling_profile, converse_profile,
                               kato_resolvent_identity_check, log_time_grid)
from semireg.spaces import GridSpace

EXACT2 = RademacherConfig(p=2.0, mode="exact")
Z_MINUS_ONE = Polynomial([-1.0, 1.0])


class _criterion:
    """Prints the per-criterion verdict line and enforces the time budget."""

    def __init__(self, num: int, name: str, budget_s: float):
        self.num = num
        self.name = name
        self.budget_s = budget_s

    def __enter__(self):
        self.started = time.perf_counter()
        return self

    def __exit__(self, exc_type, exc, tb):
        elapsed = time.perf_counter() - self.started
        status = "PASS" if exc_type is None else "FAIL"
        print(f"criterion {self.num:02d} ({self.name}): {status} "
              f"[{elapsed:.1f}s]")
        if exc_type is None:
            assert elapsed < self.budget_s, (
                f"criterion {self.num} exceeded its {self.budget_s:.0f}s "
                f"budget: {elapsed:.1f}s")
        return False


def _mult_values(dim: int) -> list:
    return [complex(-1.0, -0.5 * k) for k in range(dim)]


# --------------------------------------------------------------- 1

def test_01_resolvent_rotation_identity():
    with _criterion(1, "resolvent rotation identity", 10.0):
        instances = []
        for dim in (8, 16):
            instances += [
                ("diag_ray", dim, None),
                ("diag_ray", dim, {"phi": 0.3}),
                ("jordan", dim, None),
                ("jordan", dim, {"lam": -2.0 + 1.0j}),
                ("tridiag_laplacian", dim, None),
                ("tridiag_laplacian", dim, {"h": 0.5}),
                ("heat_conv", dim, None),
                ("shift_periodic", dim, None),
                ("skew_diag", dim, None),
                ("mult_symbol", dim, {"values": _mult_values(dim)}),
            ]
        assert len(instances) == 20
        rng = np.random.default_rng(0)
        worst = 0.0
        for name, dim, params in instances:
            gen = zoo.build(name, dim, params)
            for _ in range(5):
                theta = float(rng.uniform(0.2, math.pi))
                zeta = complex(np.exp(1j * theta))
                t = float(rng.uniform(0.3, 1.2))
                alpha = (theta / t if rng.uniform() < 0.5
                         else (theta - 2.0 * math.pi) / t)
                res = kato_resolvent_identity_check(gen, zeta, t, alpha)
                worst = max(worst, res.residual)
        assert worst <= 1e-6


# --------------------------------------------------------------- 2

def test_02_profile_dichotomy_at_scale():
    with _criterion(2, "profile dichotomy at truncation scale", 30.0):
        grid = log_time_grid(1.0, 3.0, 16)
        assert grid.min() <= 1.0 / 512.0

        ray = zoo.build("diag_ray", 512, {"phi": math.pi / 4.0})
        prof = beurling_profile(ray, Z_MINUS_ONE, grid, GridSpace.unit(512))
        # Scalar maximization of |e^{-s(1+i)} - 1| gives sup ~ 1.0696 < 1.1,
        # so the margin against the disc value 2 stays above 0.9.
        assert prof.empirical_limsup <= 1.1
        assert prof.margin >= 0.9

        skew = zoo.build("skew_diag", 512)
        prof2 = beurling_profile(skew, Z_MINUS_ONE, grid, GridSpace.unit(512))
        assert prof2.empirical_limsup >= 2.0 - 0.05


# --------------------------------------------------------------- 3

def test_03_delay_factor_monotonicity():
    with _criterion(3, "delay factor monotonicity", 30.0):
        gen = zoo.build("tridiag_laplacian", 128)
        space = GridSpace.unit(128)
        grid = log_time_grid(1.0, 2.0, 8)
        disc4 = disc_norm(Z_MINUS_ONE).value ** 4
        margins = {}
        for K in (0.0, 10.0, 40.0):
            prof = converse_profile(gen, Z_MINUS_ONE, 4, K, grid, space)
            margins[K] = disc4 - prof.values
        for K in margins:
            assert (margins[K] > 0.0).all()
        assert (margins[10.0] >= margins[0.0] - 1e-12).all()
        assert (margins[40.0] >= margins[10.0] - 1e-12).all()

        f4 = power_expand(Z_MINUS_ONE, 4)
        for K in (10.0, 40.0):
            for t in grid:
                T = gen.semigroup(float(t))
                tail = gen.semigroup(K * float(t))
                direct = eval_matrix(f4, T) @ tail
                factored = np.linalg.matrix_power(
                    eval_matrix(Z_MINUS_ONE, T), 4) @ tail
                assert float(np.linalg.norm(direct - factored, 2)) <= 1e-8


# --------------------------------------------------------------- 4

def test_04_extrapolation_chain():
    with _criterion(4, "extrapolation chain", 60.0):
        gen = zoo.build("heat_conv", 64)
        triple = InterpolationTriple.from_target(2.0, math.inf, 4.0)
        grid = log_time_grid(1.0, 3.0, 16)
        rep = extrapolation_bench(gen, Z_MINUS_ONE, triple, grid,
                                  list(range(1, 13)))
        assert rep.status == "ok"
        assert all(m <= c + 1e-6
                   for m, c in zip(rep.measured_sup, rep.chain_values))
        assert all(rep.ok_grid)
        # Frozen regression values from the first verified run.
        assert rep.rho == pytest.approx(0.49998214357517995, rel=1e-9)
        assert rep.sup_norm_p2 == pytest.approx(1.125335878108987, rel=1e-9)
        assert rep.chain_values[0] == pytest.approx(1.0607995518277604,
                                                    rel=1e-9)
        assert rep.chain_values[1] == pytest.approx(0.9186629557305946,
                                                    rel=1e-9)
        assert rep.smallest_passing_n == 2


# --------------------------------------------------------------- 5

def test_05_cosine_zero_two_dichotomy():
    with _criterion(5, "cosine zero-two dichotomy", 60.0):
        skew = zoo.build("skew_diag", 512)
        fam = cosine_from_group(skew.matrix, verify=False)
        grid = log_time_grid(1.0, math.log10(512.0), 8)
        rep = zero_two_profile([fam], grid, 2.0)
        assert rep.plateaus[0] >= 1.95
        assert rep.verdict == "plateau_two"

        bounded = cosine_from_generator(-np.eye(4, dtype=complex))
        repb = zero_two_profile([bounded], log_time_grid(1.0, 3.0, 6), 2.0)
        assert repb.plateaus[0] <= 0.05
        assert repb.verdict == "plateau_zero"

        rng = np.random.default_rng(3)
        worst = 0.0
        for name in zoo.entry_names():
            params = ({"values": _mult_values(16)}
                      if name == "mult_symbol" else None)
            spec = zoo.build(name, 16, params)
            if name in ("skew_diag", "shift_periodic"):
                cf = cosine_from_group(spec.matrix, verify=False)
            else:
                cf = cosine_from_generator(spec.matrix, verify=False)
            for _ in range(100):
                t = float(rng.uniform(0.0, 1.0))
                s = float(rng.uniform(0.0, 1.0))
                scale = 1.0 + float(np.linalg.norm(cf.sample(t)[0], 2)
                                    * np.linalg.norm(cf.sample(s)[0], 2))
                worst = max(worst, dalembert_residual(cf, t, s) / scale)
        assert worst <= 1e-8


# --------------------------------------------------------------- 6

def test_06_shifted_cosine_series():
    with _criterion(6, "shifted cosine series", 60.0):
        rng = np.random.default_rng(5)
        for _ in range(5):
            A = 0.6 * (rng.standard_normal((3, 3))
                       + 1j * rng.standard_normal((3, 3)))
            fam = cosine_from_generator(A)
            for omega in (0.25, 0.5, 1.0):
                shifted = cosine_from_generator(A - omega * np.eye(3))
                for t in (0.4, 0.8):
                    rep = fattorini_series(fam, omega, 8, t)
                    ref = shifted.sample(t)[0]
                    err = (np.linalg.norm(rep.partial_sums[-1] - ref, 2)
                           / np.linalg.norm(ref, 2))
                    assert err <= 1e-4
                    assert rep.bound_ok


# --------------------------------------------------------------- 7

def test_07_randomized_bound_anchors():
    with _criterion(7, "randomized bound anchors", 60.0):
        rng = np.random.default_rng(7)
        for _ in range(50):
            dim = int(rng.integers(2, 9))
            m = int(rng.integers(1, 7))
            space = GridSpace.unit(dim)
            ops = [rng.standard_normal((dim, dim))
                   + 1j * rng.standard_normal((dim, dim)) for _ in range(m)]
            est = rbound_estimate(ops, space, EXACT2, budget=4)
            ref = max(op_norm(T, space, seed=0).value for T in ops)
            assert abs(est.value - ref) <= 1e-6

        violations = 0
        for _ in range(500):
            dim = int(rng.integers(2, 9))
            m = int(rng.integers(1, 7))
            space = GridSpace.unit(dim,
                                   float(rng.choice([1.0, 2.0, 3.0, np.inf])))
            X = [rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
                 for _ in range(m)]
            if rng.uniform() < 0.5:
                a = rng.standard_normal(m)
            else:
                a = rng.standard_normal(m) + 1j * rng.standard_normal(m)
            if not kahane_contraction_check(X, a, space, EXACT2).ok:
                violations += 1
        assert violations == 0

        for _ in range(200):
            dim = int(rng.integers(2, 9))
            m = int(rng.integers(1, 7))
            space = GridSpace.unit(dim)
            X = [rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
                 for _ in range(m)]
            sq = square_function_norm(X, space)
            rad = rademacher_norm(X, space, EXACT2).value
            assert sq == pytest.approx(rad, rel=1e-10)


# --------------------------------------------------------------- 8

def test_08_contour_projection_and_sector_chain():
    with _criterion(8, "contour projection and sector chain", 60.0):
        analytic = [
            ("diag_ray", 8, None), ("diag_ray", 16, {"phi": 0.3}),
            ("jordan", 8, None), ("jordan", 16, {"lam": -2.0 + 1.0j}),
            ("tridiag_laplacian", 8, None),
            ("tridiag_laplacian", 16, {"h": 0.5}),
            ("heat_conv", 8, None), ("heat_conv", 16, None),
            ("diag_ray", 32, None), ("jordan", 32, None),
        ]
        zetas = [complex(-1.0), 2.0j, complex(-2.0), 1.5j,
                 complex(np.exp(2.3j))]
        rng = np.random.default_rng(2)
        count = 0
        for (name, dim, params), zeta in zip(analytic * 2, zetas * 4):
            gen = zoo.build(name, dim, params)
            lam = np.linalg.eigvals(gen.matrix)
            t = float(min(0.5 / (np.abs(lam.imag).max() + 1e-9),
                          2.0 / (np.abs(lam.real).max() + 1e-9),
                          0.35)) * float(rng.uniform(0.5, 1.0))
            tl = t * lam
            rect = ContourSpec.rectangle(float(tl.real.min()) - 0.4,
                                         float(tl.real.max()) + 0.3,
                                         float(tl.imag.min()) - 0.3,
                                         float(tl.imag.max()) + 0.3)
            chk = bt_contour_check(gen, zeta, t, rect)
            assert chk.ok
            assert chk.residual <= 1e-4
            assert chk.pole_distance > 1e-3
            assert chk.quad_converged
            count += 1
        assert count == 20

        gen = zoo.build("diag_ray", 32)
        for p in (2.0, 4.0):
            rep = r_sector_report(gen, complex(-1.0), 1.0,
                                  GridSpace.unit(32, p), EXACT2, budget=8)
            assert rep.chain_ok


# --------------------------------------------------------------- 9

def test_09_derivative_bounds():
    with _criterion(9, "derivative bounds on the circle", 10.0):
        rng = np.random.default_rng(9)
        violations = 0
        for _ in range(500):
            deg = int(rng.integers(1, 6))
            coeffs = (rng.standard_normal(deg + 1)
                      + 1j * rng.standard_normal(deg + 1))
            f = normalize_peak(Polynomial(coeffs))
            N = int(rng.integers(1, 7))
            l = int(rng.integers(0, 9))
            x = float(rng.uniform(-math.pi, math.pi))
            if not bernstein_check(f, N, l, x).ok:
                violations += 1
        assert violations == 0


# -------------------------------------------------------------- 10

def test_10_converse_randomized_bound():
    with _criterion(10, "converse randomized bound", 60.0):
        configs = [
            ("diag_ray", 8, None), ("diag_ray", 16, {"phi": 0.3}),
            ("diag_ray", 8, {"phi": 1.2}), ("jordan", 8, None),
            ("jordan", 16, {"lam": -2.0 + 1.0j}), ("jordan", 8, {"lam": -3.0}),
            ("tridiag_laplacian", 8, None),
            ("tridiag_laplacian", 16, {"h": 0.5}),
            ("heat_conv", 8, None), ("heat_conv", 16, None),
        ]
        f = normalize_peak(Z_MINUS_ONE)
        N, K, delta = 3, 40.0, math.pi / 4.0
        fN = power_expand(f, N)
        for name, dim, params in configs:
            gen = zoo.build(name, dim, params)
            space = GridSpace.unit(dim)
            R = sector_family_estimate(gen, delta, space, EXACT2,
                                       budget=24).value
            bound = r_converse_bound_eval(f, N, K, delta, R)
            ts = np.geomspace(1.0 / (100.0 * K), 1.0 / K, 8)
            fam = [eval_matrix(fN, mat_exp(gen.matrix, float(t)))
                   @ mat_exp(gen.matrix, float(K * t)) for t in ts]
            measured = rbound_estimate(fam, space, EXACT2, budget=8).value
            assert measured <= bound + 1e-9


# -------------------------------------------------------------- 11

def test_11_interpolation_inequalities():
    with _criterion(11, "interpolation inequalities", 10.0):
        rng = np.random.default_rng(11)
        violations = 0
        for _ in range(1000):
            dim = int(rng.integers(2, 17))
            p1 = float(rng.uniform(1.0, 4.0))
            p2 = p1 + float(rng.uniform(0.5, 20.0))
            if rng.uniform() < 0.2:
                p2 = math.inf
            triple = InterpolationTriple(p1, p2, float(rng.uniform(0.0, 1.0)))
            x = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
            if not lp_logconvexity_check(x, triple).ok:
                violations += 1
        assert violations == 0

        violations = 0
        for _ in range(200):
            dim = int(rng.integers(2, 9))
            p1 = float(rng.uniform(1.0, 3.0))
            p2 = p1 + float(rng.uniform(0.5, 10.0))
            if rng.uniform() < 0.25:
                p2 = math.inf
            triple = InterpolationTriple(p1, p2, float(rng.uniform(0.0, 1.0)))
            M = (rng.standard_normal((dim, dim))
                 + 1j * rng.standard_normal((dim, dim)))
            if not riesz_thorin_check(M, triple, seed=0)["ok"]:
                violations += 1
        assert violations == 0


# -------------------------------------------------------------- 12

def test_12_kernel_domination_route():
    with _criterion(12, "kernel domination route", 60.0):
        assert abs(gaussian_kernel(1.0, 0.0)
                   - (4.0 * math.pi) ** -0.5) <= 1e-12

        spec = KernelSpec(ambient_dim=1, points=64, period=20.0, a=1.0, c=1.0)
        ts = [0.2, 0.4, 0.8]
        assert max(kernel_mass_defect(spec, t) for t in ts) <= 1e-6

        probe = np.random.default_rng(12).standard_normal(spec.size)
        for t in ts:
            half = gaussian_apply(spec, 0.5 * t,
                                  gaussian_apply(spec, 0.5 * t, probe))
            full = gaussian_apply(spec, t, probe)
            resid = float(np.max(np.abs(half - full))
                          / np.max(np.abs(full)))
            assert resid <= 1e-6

        def band_limited(x):
            out = np.zeros_like(x)
            gen = np.random.default_rng(5)
            for k in range(1, 6):
                a, b = gen.standard_normal(2)
                w = 2.0 * math.pi * k / spec.period
                out = out + a * np.cos(w * x) + b * np.sin(w * x)
            return out

        fine = spec.refine()
        md = maximal_domination_check(spec, band_limited(spec.axis()), ts)
        md_fine = maximal_domination_check(fine, band_limited(fine.axis()), ts)
        move = abs(md_fine["fitted_c"] - md["fitted_c"]) / md["fitted_c"]
        assert move <= 0.10

        sq = gaussian_square_function_bench(spec, trials=8, seed=0)
        assert sq["stable"]
        assert sq["relative_change"] <= 0.10
        assert sq["constant"] <= 1.0 + 1e-9


# -------------------------------------------------------------- 13

CLI_BATTERY = [
    ["beurling", "--zoo", "diag_ray", "--dim", "8",
     "--decades", "2", "--points-per-decade", "4"],
    ["sector", "--zoo", "diag_ray", "--dim", "8",
     "--zeta", "[-1,0]", "--t0", "1.0", "--alpha-points", "4"],
    ["rbound", "--zoo", "diag_ray", "--dim", "8",
     "--mode", "exact", "--budget", "2"],
    ["r-beurling", "--zoo", "diag_ray", "--dim", "8",
     "--decades", "2", "--points-per-decade", "4",
     "--mode", "exact", "--budget", "2"],
    ["cosine", "--zoo", "tridiag_laplacian", "--dim", "8",
     "--pairs", "3", "--lam", "1.0"],
    ["zero-two", "--zoo", "skew_diag", "--dims", "[8,16]"],
    ["fattorini", "--zoo", "tridiag_laplacian", "--dim", "8",
     "--omega", "0.5", "--n-max", "4", "--t", "0.8", "--nodes", "64"],
    ["interpolate", "--zoo", "heat_conv", "--dim", "8",
     "--p1", "2", "--p2", "inf", "--theta", "0.5", "--trials", "20",
     "--decades", "2", "--points-per-decade", "4"],
    ["extrapolate", "--zoo", "heat_conv", "--dim", "8",
     "--poly", "[-1,1]", "--p1", "2", "--p2", "inf", "--p-target", "4",
     "--n-range", "[1,2]", "--decades", "2", "--points-per-decade", "4"],
    ["gaussian", "--points", "32", "--period", "20",
     "--t-list", "[0.2,0.4]", "--trials", "4"],
    ["maxreg", "--zoo", "tridiag_laplacian", "--dim", "16",
     "--tau-list", "[0.25]"],
    ["zoo", "list"],
]


def test_13_report_determinism(tmp_path):
    with _criterion(13, "report determinism", 120.0):
        for i, argv in enumerate(CLI_BATTERY):
            reports = []
            for run in ("a", "b"):
                out = tmp_path / f"{i}_{run}.json"
                assert main(argv + ["--out", str(out)]) == 0
                with open(out) as fh:
                    report = json.load(fh)
                report.pop("wall_time_s")
                report["config"].pop("out", None)
                reports.append(report)
            assert reports[0] == reports[1], argv[0]
