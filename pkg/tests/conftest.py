import time

import numpy as np
import pytest

import blockspectra as bs

# wall time of expensive session fixtures, for tests with runtime budgets
FIXTURE_SECONDS: dict[str, float] = {}


def random_selfadjoint_spec(d, rng, scale=1.0):
    """Random valid selfadjoint spec: realizable, Choi-PSD by construction.

    Builds a random PSD entry covariance symmetrized under the Hermitian
    constraint involution (i,j) -> (j,i), then reads sigma off it.
    """
    B = rng.standard_normal((d * d, d * d)) / d
    C0 = B @ B.T
    P = np.zeros((d * d, d * d))
    for i in range(d):
        for j in range(d):
            P[i * d + j, j * d + i] = 1.0
    C = 0.5 * (C0 + P @ C0 @ P) * scale
    entries = []
    for i in range(d):
        for j in range(d):
            for k in range(d):
                for l in range(d):
                    v = C[i * d + j, k * d + l]  # sigma(i,j;l,k)
                    entries.append((i + 1, j + 1, l + 1, k + 1, v))
    return bs.selfadjoint_covariance(d, entries)


def random_hh_star_spec(a, b, rng, scale=1.0):
    """Random valid hh_star spec: tau is a random PSD symmetric matrix."""
    B = rng.standard_normal((a * b, a * b)) / np.sqrt(a * b)
    T = (B @ B.T) * scale
    entries = []
    for i in range(a):
        for k in range(b):
            for j in range(a):
                for l in range(b):
                    entries.append((i + 1, k + 1, j + 1, l + 1, T[i * b + k, j * b + l]))
    return bs.hh_star_covariance(a, b, entries)


@pytest.fixture(scope="session")
def semicircle_eta():
    return bs.eta_map(bs.selfadjoint_covariance(1, [(1, 1, 1, 1, 1.0)]))


@pytest.fixture(scope="session")
def mp_spec():
    """a = b = 1, tau = 2: iid entries of variance 1/N, Marchenko-Pastur(1)."""
    return bs.hh_star_covariance(1, 1, [(1, 1, 1, 1, 2.0)])


@pytest.fixture(scope="session")
def isi44():
    return bs.isi_covariance(4, 4)


@pytest.fixture(scope="session")
def isi44_density(isi44):
    t0 = time.perf_counter()
    dens = bs.density_hh_star(
        isi44, epsilon=1e-4, config=bs.SolverConfig(tol=1e-12, newton=True)
    )
    FIXTURE_SECONDS["isi44_density"] = time.perf_counter() - t0
    return dens


@pytest.fixture(scope="session")
def isi44_grid_solutions(isi44, isi44_density):
    return bs.solve_hh_star_grid(
        isi44, isi44_density.xs, 1e-4, bs.SolverConfig(tol=1e-12, newton=True)
    )
