"""Space-time Galerkin solver for the rescaled subdiffusion equation.

Spatial discretization uses the Dirichlet Legendre combinations
phi_k = c_k (L_k - L_{k+2}) on (-1, 1)^d, whose stiffness matrix is the
identity and whose mass matrix B is pentadiagonal with closed-form entries.
The coupled tensor system is decoupled by the symmetric eigendecomposition
of B into independent N x N time solves, one per spatial eigenmode.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh

from .errors import DomainError, NumericalFailureError
from .frac_ops import FracOrder, TransformSpec, gamma_fn
from .ode_solver import (
    assemble_load,
    assemble_load_powers,
    assemble_mass,
    assemble_stiffness,
    solve_linear,
)
from .orthopoly import JacobiIndex, TimeBasis, gauss_jacobi_rule, gjp_table, legendre_phi_table
from .parallel import map_indexed

__all__ = [
    "SpatialBasis",
    "SpaceMatrices",
    "SpaceTimeSolution",
    "PDEProblem",
    "SeparableRHS",
    "space_mass_matrix",
    "assemble_spacetime_load",
    "solve_spacetime",
    "evaluate_spacetime",
    "manufactured_sine_power",
]


@dataclass(frozen=True)
class SpatialBasis:
    """Dirichlet Legendre basis of degree M per direction, d in {1, 2}."""

    m_modes: int
    dimension: int = 1

    def __post_init__(self):
        if self.m_modes < 2:
            raise DomainError(f"need polynomial degree >= 2, got {self.m_modes}")
        if self.dimension not in (1, 2):
            raise DomainError(f"dimension must be 1 or 2, got {self.dimension}")

    @property
    def n_funcs(self) -> int:
        return self.m_modes - 1


@dataclass(frozen=True)
class SpaceMatrices:
    """Spatial Galerkin matrices: stiffness is the identity, mass is B."""

    B: np.ndarray

    @property
    def A(self) -> np.ndarray:
        return np.eye(self.B.shape[0])


def space_mass_matrix(m_modes: int) -> SpaceMatrices:
    """Closed-form mass matrix b_jk = (phi_k, phi_j); nonzero for |j-k| in {0,2}."""
    if m_modes < 2:
        raise DomainError(f"need polynomial degree >= 2, got {m_modes}")
    n = m_modes - 1
    k = np.arange(n, dtype=float)
    c = 1.0 / np.sqrt(4.0 * k + 6.0)
    B = np.zeros((n, n))
    B[np.diag_indices(n)] = c * c * (2.0 / (2.0 * k + 1.0) + 2.0 / (2.0 * k + 5.0))
    j = np.arange(n - 2, dtype=float)
    off = -c[:-2] * c[2:] * 2.0 / (2.0 * (j + 2.0) + 1.0)
    B[j.astype(int), j.astype(int) + 2] = off
    B[j.astype(int) + 2, j.astype(int)] = off
    return SpaceMatrices(B)


@dataclass(frozen=True)
class SeparableRHS:
    """Source of the form f(x[, y], t) = prod_i X_i(x_i) * T(t).

    The time factor is either a tuple of (coef, power) monomials in t, loaded
    exactly by per-power Gauss-Jacobi rules, or a plain callable.
    """

    space_factors: tuple
    time_powers: tuple = None
    time_callable: object = None

    def __post_init__(self):
        if (self.time_powers is None) == (self.time_callable is None):
            raise DomainError("exactly one of time_powers/time_callable must be given")


@dataclass(frozen=True)
class PDEProblem:
    """Rescaled subdiffusion problem on (-1,1)^d with homogeneous data.

    The reaction coefficient is fixed at one: the operator is
    D^{delta,psi} v - Lap(v) + v = f.
    """

    delta: FracOrder
    transform: TransformSpec
    rhs: object
    dimension: int = 1

    def __post_init__(self):
        if self.dimension not in (1, 2):
            raise DomainError(f"dimension must be 1 or 2, got {self.dimension}")


def manufactured_sine_power(delta, transform: TransformSpec, sigma: float, dimension: int = 2):
    """Problem with exact solution prod_i sin(pi x_i) * s^sigma, plus that solution.

    The source is sin-product times [D^delta s^sigma + (d pi^2 + 1) s^sigma],
    expressed in t-monomials so the load integrates exactly in time.
    """
    delta = delta if isinstance(delta, FracOrder) else FracOrder(delta)
    if not sigma > 0:
        raise DomainError(f"power exponent must be positive, got {sigma}")
    r = transform.r
    caputo_coef = gamma_fn(sigma + 1.0) / gamma_fn(sigma + 1.0 - delta.delta)
    reaction = dimension * math.pi**2 + 1.0
    time_powers = ((caputo_coef, r * (sigma - delta.delta)), (reaction, r * sigma))
    factors = tuple(lambda x: np.sin(math.pi * np.asarray(x, dtype=float)) for _ in range(dimension))
    rhs = SeparableRHS(space_factors=factors, time_powers=time_powers)
    problem = PDEProblem(delta, transform, rhs, dimension)

    def exact(*grids):
        *xs, s = [np.atleast_1d(np.asarray(g, dtype=float)) for g in grids]
        out = s**sigma
        for x in reversed(xs):
            out = np.multiply.outer(np.sin(math.pi * x), out)
        return out

    return problem, exact


@dataclass(frozen=True)
class SpaceTimeSolution:
    """Coefficient tensor over (time modes) x (space modes per direction)."""

    V: np.ndarray
    time_basis: TimeBasis
    space_basis: SpatialBasis
    transform: TransformSpec
    residual: float = 0.0

    def evaluate(self, *grids):
        return evaluate_spacetime(self, *grids)


def _space_rule(m_modes: int, quad_guard: int):
    return gauss_jacobi_rule(JacobiIndex(0.0, 0.0), m_modes + quad_guard, (-1.0, 1.0))


def _time_load_1d(time_basis: TimeBasis, transform: TransformSpec, rhs: SeparableRHS, quad_guard: int):
    if rhs.time_powers is not None:
        return assemble_load_powers(time_basis, transform, rhs.time_powers)
    return assemble_load(
        time_basis, transform, rhs.time_callable, time_basis.n_modes + 2 * quad_guard
    )


def assemble_spacetime_load(
    problem: PDEProblem,
    time_basis: TimeBasis,
    space_basis: SpatialBasis,
    quad_guard: int = 8,
) -> np.ndarray:
    """Load tensor f_{n,k[,l]} = (f, phi_k [phi_l] j_n) over the space-time cylinder."""
    d = problem.dimension
    rule = _space_rule(space_basis.m_modes, quad_guard)
    phi = legendre_phi_table(space_basis.m_modes, rule.nodes)
    wphi = phi * rule.weights

    if isinstance(problem.rhs, SeparableRHS):
        rhs = problem.rhs
        if len(rhs.space_factors) != d:
            raise DomainError("separable source needs one spatial factor per dimension")
        ft = _time_load_1d(time_basis, problem.transform, rhs, quad_guard)
        vecs = [wphi @ np.asarray(Xf(rule.nodes), dtype=float) for Xf in rhs.space_factors]
        if d == 1:
            return np.einsum("n,k->nk", ft, vecs[0])
        return np.einsum("n,k,l->nkl", ft, vecs[0], vecs[1])

    # Generic callable f(x[, y], t): tensorized quadrature.
    f = problem.rhs
    r = problem.transform.r
    b = time_basis.interval[1]
    n_tq = time_basis.n_modes + 2 * quad_guard
    trule = gauss_jacobi_rule(JacobiIndex(0.0, float(r - 1)), n_tq, (0.0, b))
    jt = gjp_table(time_basis, trule.nodes) * (r * trule.weights)
    x = rule.nodes
    if d == 1:
        vals = np.asarray(f(x[:, None], trule.nodes[None, :]), dtype=float)
        if np.any(np.isnan(vals)):
            raise ValueError("right-hand side returned NaN at a quadrature node")
        return np.einsum("nm,ki,im->nk", jt, wphi, vals, optimize=True)
    vals = np.asarray(
        f(x[:, None, None], x[None, :, None], trule.nodes[None, None, :]), dtype=float
    )
    if np.any(np.isnan(vals)):
        raise ValueError("right-hand side returned NaN at a quadrature node")
    return np.einsum("nm,ki,lj,ijm->nkl", jt, wphi, wphi, vals, optimize=True)


def solve_spacetime(
    problem: PDEProblem,
    time_basis: TimeBasis,
    space_basis: SpatialBasis,
    quad_guard: int = 8,
) -> SpaceTimeSolution:
    """Decoupled eigenmode solve of the coupled space-time Galerkin system.

    With B = E Lam E^T, the transformed load column for spatial mode(s) with
    eigenvalue product mu and Laplacian factor nu satisfies the N x N system
    (mu S + (nu + mu) M) w = fhat; back-transforming recovers the tensor V.
    """
    d = problem.dimension
    if space_basis.dimension != d:
        raise DomainError("spatial basis dimension disagrees with the problem")
    N = time_basis.n_modes
    S = assemble_stiffness(time_basis, problem.delta, problem.transform, N + quad_guard)
    M = assemble_mass(time_basis, problem.transform)
    B = space_mass_matrix(space_basis.m_modes).B
    try:
        lam, E = eigh(B)
    except Exception as exc:  # pragma: no cover - LAPACK failure is exotic
        raise NumericalFailureError(f"eigendecomposition of B failed: {exc}") from exc
    ortho_defect = np.max(np.abs(E.T @ E - np.eye(E.shape[0])))
    if ortho_defect > 1e-12:
        raise NumericalFailureError(f"eigenvector orthonormality defect {ortho_defect:.3e}")
    if lam.min() <= 0:
        raise NumericalFailureError("spatial mass matrix lost positive definiteness")

    F = assemble_spacetime_load(problem, time_basis, space_basis, quad_guard)
    K = space_basis.n_funcs
    if d == 1:
        fhat = F @ E
        mus = lam
        nus = np.ones_like(lam)
    else:
        fhat = np.einsum("nkl,kp,lq->npq", F, E, E, optimize=True).reshape(N, K * K)
        mus = np.outer(lam, lam).ravel()
        nus = np.add.outer(lam, lam).ravel()

    vhat = np.empty_like(fhat)

    def solve_mode(idx: int):
        mu, nu = mus[idx], nus[idx]
        w, _ = solve_linear(mu * S + (nu + mu) * M, fhat[:, idx])
        return w

    for idx, w in map_indexed(solve_mode, mus.size):
        vhat[:, idx] = w

    if d == 1:
        V = vhat @ E.T
        resid_tensor = S @ V @ B + M @ V + M @ V @ B - F
    else:
        vhat = vhat.reshape(N, K, K)
        V = np.einsum("npq,kp,lq->nkl", vhat, E, E, optimize=True)
        VB2 = np.einsum("npq,pk,ql->nkl", V, B, B, optimize=True)
        VIB = np.einsum("npq,ql->npl", V, B, optimize=True)
        VBI = np.einsum("npq,pk->nkq", V, B, optimize=True)
        resid_tensor = (
            np.einsum("mn,n...->m...", S, VB2)
            + np.einsum("mn,n...->m...", M, VIB + VBI + VB2)
            - F
        )
    f_scale = np.max(np.abs(F))
    residual = float(np.max(np.abs(resid_tensor)))
    if f_scale > 0 and residual > 1e-10 * f_scale:
        raise NumericalFailureError(
            f"tensor residual {residual:.3e} exceeds 1e-10 * |F| = {1e-10 * f_scale:.3e}"
        )
    return SpaceTimeSolution(V, time_basis, space_basis, problem.transform, residual)


def evaluate_spacetime(sol: SpaceTimeSolution, *grids) -> np.ndarray:
    """Evaluate on a tensor grid: (x_points[, y_points], s_points) -> value grid.

    Initial and boundary values vanish structurally: the basis factors are
    exactly zero there in floating point.
    """
    d = sol.space_basis.dimension
    if len(grids) != d + 1:
        raise DomainError(f"expected {d + 1} point arrays, got {len(grids)}")
    *xs, s = [np.atleast_1d(np.asarray(g, dtype=float)) for g in grids]
    for x in xs:
        if np.any(np.abs(x) > 1.0 + 1e-12):
            raise DomainError("spatial points must lie in [-1, 1]")
    T = sol.transform.horizon_T
    if np.any(s < 0) or np.any(s > T * (1 + 1e-12)):
        raise DomainError(f"time points must lie in [0, {T}]")
    t = s ** (1.0 / sol.transform.r)
    jt = gjp_table(sol.time_basis, t)
    tables = [legendre_phi_table(sol.space_basis.m_modes, x) for x in xs]
    if d == 1:
        return np.einsum("nk,ka,nb->ab", sol.V, tables[0], jt, optimize=True)
    return np.einsum("nkl,ka,lb,nc->abc", sol.V, tables[0], tables[1], jt, optimize=True)
