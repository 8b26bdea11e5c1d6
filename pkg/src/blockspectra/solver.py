"""Solvers for the matrix-valued Cauchy-transform fixed-point equations.

Central equation, for z in the (closed) upper half plane:

    z G(z) = I + eta(G(z)) G(z)

whose unique solution with negative-semidefinite imaginary part is the
matrix-valued Cauchy transform of the operator-valued semicircular law
with covariance map eta. The iteration map G -> (z*id - eta(G))^{-1}
converges to it from any start with negative imaginary part; Newton on the
d^2 x d^2 linearization refines quadratically near the solution.

The Gram (HH*) variant solves the substituted equation for the hermitized
map, z H(z) = I + z eta(H(z)) H(z); it has the same structure with eta
scaled by z, so one engine serves both.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import covariance as cov
from .errors import (
    BadParameter,
    DimensionMismatch,
    IllConditioned,
    NoConvergence,
    SingularJacobian,
    SingularResolvent,
)

IM_EIG_TOL = 1e-8          # Im G must be negative semidefinite up to this
DAMPING_FLOOR = 1.0 / 64.0
DAMPING_RESET_STREAK = 10
NEWTON_HANDOFF = 1e-6      # fixed-point target before Newton takes over
MIN_GRID_EPSILON = 1e-8    # smaller offsets are rejected; extrapolate instead


@dataclass(frozen=True)
class SolverConfig:
    """Iteration controls shared by all solvers."""

    tol: float = 1e-10
    max_iter: int = 10_000
    damping: float = 1.0
    newton: bool = False

    def __post_init__(self):
        if not self.tol > 0:
            raise BadParameter("tol must be positive")
        if not 0 < self.damping <= 1:
            raise BadParameter("damping must lie in (0, 1]")
        if self.max_iter < 1:
            raise BadParameter("max_iter must be >= 1")


DEFAULT_CONFIG = SolverConfig()


@dataclass(frozen=True, eq=False)
class CauchySolution:
    """One solved point z with its matrix-valued transform G(z)."""

    z: complex
    G: np.ndarray
    residual: float
    iterations: int
    converged: bool


@dataclass(frozen=True, eq=False)
class HHStarSolution:
    """Solved Gram-law point: blocks of H(z), scalar transform, diagnostics."""

    z: complex
    G1: np.ndarray
    G2: np.ndarray
    g: complex
    residual: float
    split_residuals: tuple[float, float]
    iterations: int
    converged: bool


def imaginary_part(G) -> np.ndarray:
    """Hermitian imaginary part (G - G*) / 2i."""
    G = np.asarray(G, dtype=complex)
    return (G - G.conj().swapaxes(-1, -2)) / 2j


def max_im_eigenvalue(G) -> float:
    """Largest eigenvalue of the imaginary part; <= 0 selects the physical branch."""
    return float(np.linalg.eigvalsh(imaginary_part(G)).max())


def _project_negative_imaginary(G):
    """Clip the imaginary part to strictly negative eigenvalues."""
    G = np.asarray(G, dtype=complex)
    A = (G + G.conj().T) / 2
    B = imaginary_part(G)
    w, U = np.linalg.eigh(B)
    w = np.minimum(w, -1e-12)
    return A + 1j * (U * w) @ U.conj().T


# ---------------------------------------------------------------------------
# batched engine: equation z G = I + s * eta(G) G over a batch of points,
# with s = 1 for the plain equation and s = z for the Gram (H) equation.
# ---------------------------------------------------------------------------

def _eta_batch(tensor, G):
    # matmul-backed contraction tensor[ij,kl] @ G[p,kl]
    P = G.shape[0]
    do, di = tensor.shape[0], tensor.shape[2]
    flat = tensor.reshape(do * do, di * di) @ G.reshape(P, di * di).T
    return np.ascontiguousarray(flat.T).reshape(P, do, do)


def _residual_batch(tensor, zs, scale, G, EG=None):
    d = G.shape[-1]
    if EG is None:
        EG = _eta_batch(tensor, G)
    R = zs[:, None, None] * G - np.eye(d) - scale[:, None, None] * np.matmul(EG, G)
    return np.linalg.norm(R, axis=(1, 2))


def _fixed_point_batch(tensor, zs, scale, G, config, target, budget):
    """Damped fixed-point sweep; damping adapts per point."""
    P, d, _ = G.shape
    theta = np.full(P, config.damping)
    streak = np.zeros(P, dtype=int)
    EG = _eta_batch(tensor, G)
    res = _residual_batch(tensor, zs, scale, G, EG)
    iters = np.zeros(P, dtype=int)
    eye = np.eye(d)
    for _ in range(budget):
        active = res > target
        if not active.any():
            break
        A = zs[:, None, None] * eye - scale[:, None, None] * EG
        try:
            F = np.linalg.inv(A)
        except np.linalg.LinAlgError as exc:
            raise SingularResolvent(
                "z*id - eta(G) not invertible at an iterate; "
                "check the covariance map or move z away from the real axis"
            ) from exc
        Gn = np.where(active[:, None, None], G + theta[:, None, None] * (F - G), G)
        EGn = _eta_batch(tensor, Gn)
        resn = _residual_batch(tensor, zs, scale, Gn, EGn)
        worse = active & (resn > res)
        theta[worse] = np.maximum(theta[worse] / 2, DAMPING_FLOOR)
        streak[worse] = 0
        better = active & ~worse
        streak[better] += 1
        refresh = streak >= DAMPING_RESET_STREAK
        theta[refresh] = config.damping
        streak[refresh] = 0
        iters[active] += 1
        G, res, EG = Gn, resn, EGn
    return G, res, iters


def _newton_batch(tensor, zs, scale, G, config, target, budget=60, support=None):
    """Newton on the d^2 linearization with per-point backtracking.

    ``support`` optionally lists the flat (i*d+j) entries the solution lives
    on (an exactly invariant sparsity pattern, e.g. the diagonal blocks of a
    hermitized map); the linear system is then solved on that subspace only.
    """
    P, d, _ = G.shape
    eye = np.eye(d)
    res = _residual_batch(tensor, zs, scale, G)
    iters = np.zeros(P, dtype=int)
    stuck = np.zeros(P, dtype=bool)
    if support is None:
        support = np.arange(d * d)
    support = np.asarray(support, dtype=int)
    m = len(support)
    rows_t = (support % d) * d + support // d  # (i,j) -> flat (j,i)
    ri, rj = support // d, support % d
    delta_jl = (rj[:, None] == rj[None, :]).astype(float)
    eye_m = np.eye(m)
    tsub = np.ascontiguousarray(tensor.reshape(d, d, d * d)[:, :, support])
    for _ in range(budget):
        active = (res > target) & ~stuck
        if not active.any():
            break
        ii = np.flatnonzero(active)
        Gi, zi, si = G[ii], zs[ii], scale[ii]
        EG = _eta_batch(tensor, Gi)
        Ri = zi[:, None, None] * Gi - eye - si[:, None, None] * np.matmul(EG, Gi)
        # M1[p,(ij),(kl)] = sum_m tensor[i,m,k,l] G[p,m,j]  (eta(dG) G term)
        M1 = np.tensordot(Gi, tsub, axes=(1, 1)).reshape(len(ii), d * d, m)[
            :, rows_t, :
        ]
        # M2 = kron(eta(G), I) on the subspace  (eta(G) dG term)
        M2 = EG[:, ri[:, None], ri[None, :]] * delta_jl
        J = zi[:, None, None] * eye_m - si[:, None, None] * (M1 + M2)
        rhs = -Ri.reshape(len(ii), d * d)[:, support, None]
        try:
            flat = np.linalg.solve(J, rhs)[..., 0]
        except np.linalg.LinAlgError:
            flat = np.zeros((len(ii), m), dtype=complex)
            for k in range(len(ii)):
                try:
                    flat[k] = np.linalg.solve(J[k], rhs[k])[:, 0]
                except np.linalg.LinAlgError:
                    stuck[ii[k]] = True
        step = np.zeros((len(ii), d * d), dtype=complex)
        step[:, support] = flat
        step = step.reshape(len(ii), d, d)
        factor = np.ones(len(ii))
        improved = np.zeros(len(ii), dtype=bool)
        Gbest = Gi.copy()
        for _bt in range(9):
            pending = ~improved
            if not pending.any():
                break
            trial = Gi + factor[:, None, None] * step
            rtrial = _residual_batch(tensor, zi, si, trial)
            good = pending & (rtrial < res[ii])
            Gbest[good] = trial[good]
            res[ii[good]] = rtrial[good]
            improved |= good
            factor[pending] /= 2
        stuck[ii[~improved]] = True
        G[ii] = Gbest
        iters[ii[improved]] += 1
    return G, res, iters, stuck


def _epsilon_ladder(epsilon, span, factor=2.0):
    e0 = max(epsilon, span / 8.0, 1e-3)
    levels = []
    e = e0
    while e > epsilon * (1 + 1e-9):
        levels.append(e)
        e /= factor
    levels.append(epsilon)
    return levels


def _solve_points(tensor, zs, scale, config, G0=None, fp_budget=None, tol=None,
                  support=None):
    """Solve a batch at fixed z values; returns (G, res, iters, converged)."""
    P = len(zs)
    d = tensor.shape[0]
    tol = config.tol if tol is None else tol
    if G0 is None:
        G0 = np.broadcast_to(-1j * np.eye(d), (P, d, d)).copy()
    target = max(tol, NEWTON_HANDOFF) if config.newton else tol
    budget = fp_budget if fp_budget is not None else config.max_iter
    G, res, fits = _fixed_point_batch(tensor, zs, scale, G0, config, target, budget)
    nits = np.zeros(P, dtype=int)
    if config.newton:
        G, res, nits, _ = _newton_batch(tensor, zs, scale, G, config, tol,
                                        support=support)
    with np.errstate(all="ignore"):
        im_ok = np.array([max_im_eigenvalue(g) <= IM_EIG_TOL for g in G])
    converged = (res <= tol) & im_ok
    return G, res, fits + nits, converged


def _solve_continuation(tensor, xs, epsilon, config, scale_is_z, record=(),
                        support=None):
    """Solve a grid by stepping the offset down from a safe start.

    ``record`` lists extra offsets on the ladder whose solved batches the
    caller also wants (e.g. 2*epsilon for Richardson extrapolation).
    Returns (G, res, iters, converged, snapshots) with one snapshot tuple
    per recorded offset.
    """
    xs = np.asarray(xs, dtype=float)
    P = len(xs)
    d = tensor.shape[0]
    span = float(xs.max() - xs.min()) if P > 1 else 1.0
    span = max(span, 1.0)
    G = np.broadcast_to(-1j * np.eye(d), (P, d, d)).copy()
    total = np.zeros(P, dtype=int)
    factor = 4.0 if config.newton else 2.0
    levels = sorted(
        set(_epsilon_ladder(epsilon, span, factor)) | set(record), reverse=True
    )
    snapshots = {}
    for lev, eps in enumerate(levels):
        zs = xs + 1j * eps
        scale = zs if scale_is_z else np.ones(P, dtype=complex)
        last = lev == len(levels) - 1
        wanted = last or eps in record
        if config.newton:
            fp_budget = 40 if lev == 0 else 6
            # intermediate levels only feed warm starts; full accuracy is
            # needed only where results are consumed
            tol = config.tol if wanted else max(config.tol, 1e-7)
        else:
            fp_budget = config.max_iter if last else min(config.max_iter, 120)
            tol = config.tol
        fp_budget = min(fp_budget, config.max_iter)
        G, res, its, converged = _solve_points(
            tensor, zs, scale, config, G0=G, fp_budget=fp_budget, tol=tol,
            support=support,
        )
        total += its
        if eps in record:
            snapshots[eps] = (G.copy(), res.copy(), converged.copy())
    return G, res, total, converged, [snapshots[e] for e in record]


# ---------------------------------------------------------------------------
# public solvers
# ---------------------------------------------------------------------------

def _require_square(eta):
    if eta.dim_in != eta.dim_out:
        raise DimensionMismatch("the fixed-point equation needs a square map")


def _require_upper_half(z):
    if complex(z).imag < 0:
        raise BadParameter(f"z must lie in the closed upper half plane, got {z}")


def solve_fixed_point(eta, z, config=None, warm_start=None) -> CauchySolution:
    """Solve z G = I + eta(G) G at one point by damped iteration.

    Starts from -i*I (or from ``warm_start`` projected to negative imaginary
    part) and, if ``config.newton`` is set, refines with Newton once the
    fixed-point residual reaches 1e-6. The best iterate is returned even on
    iteration-budget exhaustion, with ``converged=False``.
    """
    config = config or DEFAULT_CONFIG
    _require_square(eta)
    _require_upper_half(z)
    d = eta.dim_out
    if warm_start is not None:
        W = np.asarray(warm_start, dtype=complex)
        if W.shape != (d, d):
            raise DimensionMismatch(f"warm start must be {d}x{d}")
        G0 = _project_negative_imaginary(W)[None, :, :]
    else:
        G0 = None
    zs = np.array([complex(z)])
    scale = np.ones(1, dtype=complex)
    G, res, its, converged = _solve_points(eta.tensor, zs, scale, config, G0=G0)
    return CauchySolution(complex(z), G[0], float(res[0]), int(its[0]), bool(converged[0]))


def newton_refine(eta, z, G0, config=None) -> CauchySolution:
    """Newton refinement of an approximate solution G0.

    Each step solves the d^2 x d^2 linearization
    z*dG - eta(dG) G - eta(G) dG = -(z G - I - eta(G) G). Quadratic
    convergence when started in the basin (residual below ~1e-2).
    """
    config = config or DEFAULT_CONFIG
    _require_square(eta)
    _require_upper_half(z)
    d = eta.dim_out
    G0 = np.asarray(G0, dtype=complex)
    if G0.shape != (d, d):
        raise DimensionMismatch(f"G0 must be {d}x{d}")
    zs = np.array([complex(z)])
    scale = np.ones(1, dtype=complex)
    G = G0[None, :, :].copy()
    budget = min(config.max_iter, 60)
    G, res, its, stuck = _newton_batch(
        eta.tensor, zs, scale, G, config, config.tol, budget=budget
    )
    if stuck[0] and res[0] > max(config.tol, NEWTON_HANDOFF):
        raise SingularJacobian(
            "Newton made no progress (singular or stalled linearization); "
            "fall back to solve_fixed_point"
        )
    converged = res[0] <= config.tol and max_im_eigenvalue(G[0]) <= IM_EIG_TOL
    return CauchySolution(complex(z), G[0], float(res[0]), int(its[0]), bool(converged))


def _check_monotone(xs):
    xs = np.asarray(xs, dtype=float)
    if xs.ndim != 1 or len(xs) == 0:
        raise BadParameter("xs must be a nonempty 1-d array")
    diffs = np.diff(xs)
    if len(xs) > 1 and not ((diffs >= 0).all() or (diffs <= 0).all()):
        raise BadParameter("xs must be monotone")
    return xs


def solve_grid(eta, xs, epsilon, config=None, strategy="continuation"):
    """Solve along z = x + i*epsilon for every x in a monotone grid.

    ``strategy="continuation"`` (default) solves all points simultaneously,
    walking the imaginary offset down from a safe level so each level warm
    starts the next; ``"sweep"`` walks the grid point by point, warm-starting
    each solve from its neighbor. Both return the same values (warm starts
    affect iteration counts only). Offsets below 1e-8 are rejected; recover
    the real-axis limit by extrapolation instead.

    Raises NoConvergence naming the failing grid indices if any point misses
    the residual target or the negative-imaginary-part invariant.
    """
    config = config or DEFAULT_CONFIG
    _require_square(eta)
    xs = _check_monotone(xs)
    if epsilon < MIN_GRID_EPSILON:
        raise BadParameter(f"epsilon {epsilon} below the {MIN_GRID_EPSILON} floor")
    if strategy == "sweep":
        sols = []
        warm = None
        for x in xs:
            s = solve_fixed_point(eta, complex(x, epsilon), config, warm_start=warm)
            warm = s.G
            sols.append(s)
        bad = [i for i, s in enumerate(sols) if not s.converged]
        if bad:
            raise NoConvergence(f"grid points {bad} did not converge")
        return sols
    if strategy != "continuation":
        raise BadParameter(f"unknown strategy {strategy!r}")
    order = np.argsort(xs, kind="stable")
    xs_sorted = np.asarray(xs, dtype=float)[order]
    G, res, its, converged, _ = _solve_continuation(
        eta.tensor, xs_sorted, float(epsilon), config, scale_is_z=False
    )
    inverse = np.empty_like(order)
    inverse[order] = np.arange(len(order))
    sols = [
        CauchySolution(
            complex(xs[i], epsilon),
            G[inverse[i]],
            float(res[inverse[i]]),
            int(its[inverse[i]]),
            bool(converged[inverse[i]]),
        )
        for i in range(len(xs))
    ]
    bad = [i for i, s in enumerate(sols) if not s.converged]
    if bad:
        raise NoConvergence(f"grid points {bad} did not converge")
    return sols


def _split_blocks(H, a):
    return H[:a, :a], H[a:, a:]


def _hh_star_solution(spec, z, H, res, its, converged) -> HHStarSolution:
    a, b = spec.a, spec.b
    G1, G2 = _split_blocks(H, a)
    g = complex(np.trace(G1) / a)
    r1 = float(
        np.linalg.norm(z * G1 - np.eye(a) - z * cov.eta1_apply(spec, G2) @ G1)
    )
    r2 = float(
        np.linalg.norm(z * G2 - np.eye(b) - z * cov.eta2_apply(spec, G1) @ G2)
    )
    return HHStarSolution(
        z=complex(z),
        G1=G1,
        G2=G2,
        g=g,
        residual=float(res),
        split_residuals=(r1, r2),
        iterations=int(its),
        converged=bool(converged),
    )


def solve_hh_star(spec, z, config=None) -> HHStarSolution:
    """Solve the Gram-law equations of an hh_star spec at one point.

    Works on the hermitized map via z H = I + z eta(H) H, whose solution is
    block diagonal H = diag(G1, G2); the corners stay exactly zero along the
    iteration because the hermitized map annihilates them. Returns the blocks,
    the scalar transform g = tr_a(G1), and the residuals of the two split
    equations z G1 = I + z eta1(G2) G1 and z G2 = I + z eta2(G1) G2.
    """
    config = config or DEFAULT_CONFIG
    spec = cov.validate_covariance(spec) if not spec.validated else spec
    _require_upper_half(z)
    eta = cov.eta_map(cov.hermitize_covariance(spec))
    zs = np.array([complex(z)])
    support = _block_support(spec.a + spec.b, spec.a)
    G, res, its, converged = _solve_points(
        eta.tensor, zs, zs.copy(), config, support=support
    )
    return _hh_star_solution(spec, complex(z), G[0], res[0], its[0], converged[0])


def solve_hh_star_grid(spec, xs, epsilon, config=None):
    """Gram-law solutions along z = x + i*epsilon; continuation strategy."""
    config = config or DEFAULT_CONFIG
    spec = cov.validate_covariance(spec) if not spec.validated else spec
    xs = _check_monotone(xs)
    if epsilon < MIN_GRID_EPSILON:
        raise BadParameter(f"epsilon {epsilon} below the {MIN_GRID_EPSILON} floor")
    eta = cov.eta_map(cov.hermitize_covariance(spec))
    G, res, its, converged, _ = _solve_continuation(
        eta.tensor, xs, float(epsilon), config, scale_is_z=True,
        support=_block_support(spec.a + spec.b, spec.a),
    )
    sols = [
        _hh_star_solution(
            spec, complex(xs[i], epsilon), G[i], res[i], its[i], converged[i]
        )
        for i in range(len(xs))
    ]
    bad = [i for i, s in enumerate(sols) if not s.converged]
    if bad:
        raise NoConvergence(f"grid points {bad} did not converge")
    return sols


def solve_gram_grid(eta, side, xs, epsilon, config=None):
    """Gram-law grid for an arbitrary hermitized map.

    Solves z H = I + z eta(H) H and returns (solutions, g) where g[k] is the
    normalized trace of the leading ``side`` x ``side`` block at grid point k.
    """
    config = config or DEFAULT_CONFIG
    _require_square(eta)
    xs = _check_monotone(xs)
    if epsilon < MIN_GRID_EPSILON:
        raise BadParameter(f"epsilon {epsilon} below the {MIN_GRID_EPSILON} floor")
    G, res, its, converged, _ = _solve_continuation(
        eta.tensor, xs, float(epsilon), config, scale_is_z=True,
        support=_block_support(eta.dim_out, side),
    )
    bad = list(np.flatnonzero(~converged))
    if bad:
        raise NoConvergence(f"grid points {bad} did not converge")
    sols = [
        CauchySolution(complex(xs[i], epsilon), G[i], float(res[i]), int(its[i]), True)
        for i in range(len(xs))
    ]
    g = np.array([np.trace(s.G[:side, :side]) / side for s in sols])
    return sols, g


def solve_hh_star_direct(spec, z, config=None) -> CauchySolution:
    """Verification route: solve the eliminated equation for G1 directly.

    Iterates G1 -> (z I_a - eta1((I_b - eta2(G1))^{-1}))^{-1}. Kept as an
    independent cross-check of the hermitized route; both must agree.
    """
    config = config or DEFAULT_CONFIG
    spec = cov.validate_covariance(spec) if not spec.validated else spec
    _require_upper_half(z)
    a, b = spec.a, spec.b
    e1, e2 = cov.eta1_map(spec), cov.eta2_map(spec)
    eye_a, eye_b = np.eye(a), np.eye(b)
    G1 = -1j * eye_a
    theta = config.damping
    streak = 0

    def residual(G):
        W = cov.eta_apply(e1, np.linalg.inv(eye_b - cov.eta_apply(e2, G)))
        return float(np.linalg.norm(z * G - eye_a - W @ G)), W

    res, W = residual(G1)
    its = 0
    for _ in range(config.max_iter):
        if res <= config.tol:
            break
        try:
            F = np.linalg.inv(z * eye_a - W)
        except np.linalg.LinAlgError as exc:
            raise SingularResolvent("direct Gram iteration hit a singular resolvent") from exc
        Gn = G1 + theta * (F - G1)
        resn, Wn = residual(Gn)
        if resn > res:
            theta = max(theta / 2, DAMPING_FLOOR)
            streak = 0
        else:
            streak += 1
            if streak >= DAMPING_RESET_STREAK:
                theta = config.damping
                streak = 0
        G1, res, W = Gn, resn, Wn
        its += 1
    converged = res <= config.tol and max_im_eigenvalue(G1) <= IM_EIG_TOL
    return CauchySolution(complex(z), G1, res, its, bool(converged))


def _block_support(d, side):
    """Flat indices of the two diagonal blocks of a (side, d-side) split."""
    idx = [i * d + j for i in range(side) for j in range(side)]
    idx += [i * d + j for i in range(side, d) for j in range(side, d)]
    return np.array(idx, dtype=int)


def _solve_grid_pair(tensor, xs, eps2, config, scale_is_z, support=None):
    """Solve a grid at offsets 2*eps2 and eps2 in one continuation ladder.

    Returns ((G_2eps, res, conv), (G_eps, res, conv)); the inner arrays are
    stacked over grid points. Used by the inversion pipelines.
    """
    eps2 = float(eps2)
    G, res, _, conv, snaps = _solve_continuation(
        tensor, xs, eps2, config, scale_is_z, record=(2 * eps2,), support=support
    )
    return snaps[0], (G, res, conv)


@dataclass(frozen=True)
class MomentEstimates:
    """Normalized-trace moments extracted from large-|z| evaluations."""

    m0: float
    m2: float
    m4: float


def moment_check(eta, radii=None, config=None) -> MomentEstimates:
    """Extract m0, m2, m4 from the Laurent tail of G along the imaginary axis.

    Fits Re tr_d(z G(i R)) as a polynomial in 1/R^2 over several radii; the
    expansion G(z) = I/z + M2/z^3 + M4/z^5 + ... has no odd terms. Radii must
    sit well outside the spectral support or the extraction is refused.
    """
    config = config or DEFAULT_CONFIG
    _require_square(eta)
    d = eta.dim_out
    m2_map = cov.eta_apply(eta, np.eye(d))
    lam = float(np.linalg.eigvalsh((m2_map + m2_map.conj().T) / 2).max())
    edge = 2.0 * np.sqrt(max(lam, 1e-12))
    if radii is None:
        base = max(edge, 1.0)
        radii = base * np.array([4.0, 8.0, 16.0, 32.0, 64.0])
    radii = np.asarray(radii, dtype=float)
    if len(radii) < 3:
        raise BadParameter("need at least three radii")
    if radii.min() < 2.0 * edge:
        raise IllConditioned(
            f"smallest radius {radii.min():.3g} is inside 2x the support "
            f"estimate {edge:.3g}; moment extraction would be unstable"
        )
    tight = SolverConfig(
        tol=min(config.tol, 1e-12), max_iter=config.max_iter,
        damping=config.damping, newton=config.newton,
    )
    w = []
    for R in radii:
        sol = solve_fixed_point(eta, 1j * R, tight)
        if not sol.converged:
            raise NoConvergence(f"moment probe at z = {1j * R} did not converge")
        w.append(float((1j * R * np.trace(sol.G) / d).real))
    u = 1.0 / radii**2
    V = np.vander(u, N=len(radii), increasing=True)
    coeff = np.linalg.solve(V, np.asarray(w))
    return MomentEstimates(m0=float(coeff[0]), m2=float(-coeff[1]), m4=float(coeff[2]))
