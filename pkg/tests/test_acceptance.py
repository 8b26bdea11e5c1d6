"""Acceptance suite: one test per shipping criterion, at pinned tolerances.

Each test prints a single PASS/FAIL line (visible with ``pytest -s`` or on
failure). Criterion 7 re-examines the solutions produced by the others, so
it is defined last in this module.
"""

import time

import numpy as np
import pytest

import blockspectra as bs
from blockspectra.solver import max_im_eigenvalue

from conftest import random_selfadjoint_spec
from reference_laws import mp1_pdf, semicircle_pdf

NEWTON12 = bs.SolverConfig(tol=1e-12, newton=True)

# solutions collected by the other criteria for the positivity sweep
_POSITIVITY_WITNESSES: list[tuple[str, float]] = []


def _witness(label, G):
    _POSITIVITY_WITNESSES.append((label, max_im_eigenvalue(G)))


def _report(num, label, ok, detail):
    print(f"criterion {num} [{'PASS' if ok else 'FAIL'}] {label}: {detail}")
    assert ok, f"criterion {num} failed: {detail}"


def test_criterion_1_semicircle_closed_form(semicircle_eta):
    xs = np.linspace(-2.2, 2.2, 512)
    t0 = time.perf_counter()
    dens = bs.density_from_eta(semicircle_eta, xs=xs, epsilon=2e-5)
    elapsed = time.perf_counter() - t0
    err = float(np.abs(dens.ps - semicircle_pdf(xs)).max())
    sols = bs.solve_grid(semicircle_eta, xs[::16], 2e-5, NEWTON12)
    for s in sols:
        _witness("semicircle", s.G)
    _report(
        1, "semicircle density sup-error < 1e-3, runtime < 1 s",
        err < 1e-3 and elapsed < 1.0,
        f"sup-error {err:.2e}, runtime {elapsed:.3f}s",
    )


def test_criterion_2_marchenko_pastur(mp_spec):
    sol = bs.solve_hh_star(mp_spec, 5.0 + 0.0j, bs.SolverConfig(tol=1e-13))
    g_err = abs(sol.g - (5 - np.sqrt(5)) / 10)
    dens = bs.density_hh_star(mp_spec, epsilon=2e-5)
    mask = (dens.xs >= 0.05) & (dens.xs <= 4.2)
    # the closed-form density is unbounded at 0+; compare off the
    # integrable singularity
    d_err = float(np.abs(dens.ps[mask] - mp1_pdf(dens.xs[mask])).max())
    _witness("mp g(5)", np.atleast_2d(sol.g))
    _report(
        2, "MP(1): g(5) to 1e-10 and density sup-error < 2e-3",
        g_err < 1e-10 and d_err < 2e-3,
        f"|g(5) - (5-sqrt5)/10| = {g_err:.2e}, density sup-error {d_err:.2e}",
    )


def test_criterion_3_isi_printed_system(isi44_grid_solutions):
    worst_sys = 0.0
    worst_structure = 0.0
    for s in isi44_grid_solutions:
        f = np.diagonal(s.G1)
        worst_structure = max(
            worst_structure,
            float(np.abs(s.G1 - np.diag(f)).max()),
            abs(f[0] - f[3]),
            abs(f[1] - f[2]),
        )
        f1, f2, z = f[0], f[1], s.z
        e1 = z - (1 / f1 + 1 / (11 - f1) + 1 / (11 - f1 - f2)
                  + 1 / (11 - f1 - 2 * f2) + 1 / (11 - 2 * f1 - 2 * f2))
        e2 = z - (1 / f2 + 1 / (11 - f1 - f2) + 2 / (11 - f1 - 2 * f2)
                  + 1 / (11 - 2 * f1 - 2 * f2))
        worst_sys = max(worst_sys, abs(e1), abs(e2))
        _witness("isi grid", s.G1)
    _report(
        3, "ISI K=L=4 frames satisfy the two-equation system at every grid point",
        worst_sys < 1e-8 and worst_structure < 1e-10,
        f"worst system residual {worst_sys:.2e}, "
        f"worst diag/frame-symmetry deviation {worst_structure:.2e}",
    )


def test_criterion_4_monte_carlo_ks(isi44, isi44_density):
    from conftest import FIXTURE_SECONDS

    t0 = time.perf_counter()
    F = bs.cdf(isi44_density)
    pooled = np.concatenate([
        bs.sample_block_gaussian(
            isi44, 100, np.random.SeedSequence(entropy=2024, spawn_key=(100, r))
        ).eigenvalues
        for r in range(100)
    ])
    ks = bs.ks_distance(pooled, F)
    elapsed = time.perf_counter() - t0 + FIXTURE_SECONDS.get("isi44_density", 0.0)
    _report(
        4, "ISI K=L=4, N=100 x 100 realizations: KS < 0.05 in < 2 min",
        ks < 0.05 and elapsed < 120.0,
        f"KS = {ks:.4f} over {pooled.size} pooled eigenvalues, "
        f"runtime {elapsed:.1f}s incl. the solved density",
    )


def test_criterion_5_moment_oracle_equivalence(semicircle_eta):
    cases = [("semicircle", semicircle_eta)]
    for seed in (101, 202):
        rng = np.random.default_rng(seed)
        cases.append((f"random d=3 #{seed}", bs.eta_map(random_selfadjoint_spec(3, rng))))
    worst = 0.0
    for label, eta in cases:
        dens = bs.density_from_eta(eta, epsilon=5e-5, config=NEWTON12)
        for k in (2, 4, 6, 8):
            _, tr = bs.nc2_moment(eta, k)
            got = bs.moments_from_density(dens, k)
            worst = max(worst, abs(got / tr.real - 1.0))
    _report(
        5, "pairing-recursion vs density moments m2..m8 within 1e-2 relative",
        worst < 1e-2,
        f"worst relative deviation {worst:.2e} across 3 specs x 4 orders",
    )


def test_criterion_6_fading_reductions():
    cfg = bs.SolverConfig(tol=1e-12)
    fam_id = bs.CorrelationFamily(psi=(np.eye(3),), psi_hat=(np.eye(3),))
    worst_mp = 0.0
    for x in np.linspace(0.2, 6.0, 20):
        z = complex(x, 0.05)
        sol = bs.solve_fading(fam_id, z, cfg)
        mp = (z - np.sqrt(z) * np.sqrt(z - 4)) / (2 * z)
        worst_mp = max(worst_mp, abs(sol.g - mp))
        _witness("fading id", sol.G1)

    rng = np.random.default_rng(31)
    p = 3
    A, B = rng.standard_normal((p, p)), rng.standard_normal((p, p))
    Psi, PsiHat = A @ A.T / p, B @ B.T / p
    fam = bs.CorrelationFamily(psi=(Psi,), psi_hat=(PsiHat,))
    entries = [
        (i + 1, k + 1, j + 1, l + 1, 2.0 * Psi[i, j] * PsiHat[l, k])
        for i in range(p) for k in range(p) for j in range(p) for l in range(p)
    ]
    spec = bs.hh_star_covariance(p, p, entries)
    worst_block = 0.0
    for x in np.linspace(0.3, 6.0, 20):
        z = complex(x, 0.1)
        g_f = bs.solve_fading(fam, z, cfg).g
        g_b = bs.solve_hh_star(spec, z, cfg).g
        worst_block = max(worst_block, abs(g_f - g_b))
    _report(
        6, "one-term fading: MP(1) and hermitized-route agreement to 1e-8",
        worst_mp < 1e-8 and worst_block < 1e-8,
        f"MP deviation {worst_mp:.2e}, two-route deviation {worst_block:.2e} "
        f"on 20-point grids",
    )


def test_criterion_8_rectangular_consistency():
    rng = np.random.default_rng(88)
    spec = random_selfadjoint_spec(3, rng)
    rect = bs.rectangular_covariance((1 / 3, 1 / 3, 1 / 3), spec.entries)
    e_sq, e_al = bs.eta_map(spec), bs.eta_alpha_map(rect)
    worst = 0.0
    for z in (1j, 0.8 + 0.2j, -1.3 + 0.05j, 2.0 + 0.5j):
        s1 = bs.solve_fixed_point(e_sq, z, NEWTON12)
        s2 = bs.solve_fixed_point(e_al, z, NEWTON12)
        worst = max(worst, float(np.abs(s1.G - s2.G).max()))
        _witness("rectangular", s2.G)
    uneven = bs.rectangular_covariance(
        (1 / 3, 2 / 3), [(1, 1, 1, 1, 1.0), (2, 2, 2, 2, 1.0), (1, 2, 2, 1, 1.0)]
    )
    dens = bs.density_from_eta(
        bs.eta_alpha_map(uneven), trace_weights=uneven.alpha, epsilon=5e-5,
        config=NEWTON12,
    )
    m = bs.mass(dens)
    _report(
        8, "equal-weight reduction to 1e-12; uneven-weight mass within 5e-3",
        worst < 1e-12 and abs(m - 1.0) < 5e-3,
        f"equal-weight max deviation {worst:.2e}, uneven-weight mass {m:.5f}",
    )


def test_criterion_9_capacity_convergence():
    isi22 = bs.isi_covariance(2, 2)
    dens = bs.density_hh_star(isi22, epsilon=1e-4, config=NEWTON12)
    snrs = (0.1, 1.0, 10.0)
    c_inf = np.array([bs.capacity(dens, s) for s in snrs])
    medians = {}
    for N in (2, 4, 10):
        caps = []
        for r in range(50):
            smp = bs.sample_block_gaussian(
                isi22, N, np.random.SeedSequence(entropy=7, spawn_key=(N, r))
            )
            lam = np.clip(smp.eigenvalues, 0.0, None)
            caps.append([float(np.mean(np.log2(1 + s * lam))) for s in snrs])
        medians[N] = np.median(np.array(caps), axis=0)
    rel10 = float(np.abs(medians[10] / c_inf - 1.0).max())
    gaps = {N: np.abs(medians[N] - c_inf) for N in medians}
    monotone = bool(np.all(gaps[2] > gaps[4]) and np.all(gaps[4] > gaps[10]))
    _report(
        9, "ISI K=L=2: N=10 capacity within 3%, monotone approach over N",
        rel10 < 0.03 and monotone,
        f"max relative gap at N=10: {rel10:.4f}; "
        f"median gaps 2/4/10: {[float(g.max()) for g in gaps.values()]}",
    )


def test_criterion_7_positivity_everywhere(isi44_grid_solutions, mp_spec):
    # the witnesses gathered by criteria 1-9 plus a dedicated sweep
    extra = []
    for x in np.linspace(0.05, 4.5, 25):
        sol = bs.solve_hh_star(mp_spec, complex(x, 1e-3), NEWTON12)
        extra.append(("mp sweep", max_im_eigenvalue(sol.G1)))
    values = _POSITIVITY_WITNESSES + extra
    assert len(values) > 100, "positivity sweep needs the other criteria's solutions"
    worst = max(v for _, v in values)
    _report(
        7, "max eigenvalue of Im G <= 1e-8 at every converged point",
        worst <= 1e-8,
        f"worst Im-eigenvalue {worst:.2e} over {len(values)} solutions",
    )
