"""Galerkin spectral solver for the rescaled scalar fractional problem.

Solves D^{delta,psi} v + lam * v = f on (0, T^gamma) with zero value at the
origin, using the boundary-adapted Jacobi basis in time.  Stiffness entries
are assembled by the double Gauss-Jacobi quadrature in which both singular
kernel factors are absorbed into rule weights; only the smooth non-polynomial
factor ((1-tau^r)/(1-tau))^(-delta) is sampled pointwise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NumericalFailureError
from .frac_ops import FracOrder, PowerSum, TransformSpec, gamma_fn
from .orthopoly import (
    JacobiIndex,
    TimeBasis,
    gauss_jacobi_rule,
    gjp_table,
    jacobi_table,
)

__all__ = [
    "TimeProblem",
    "AssembledSystem",
    "TimeSolution",
    "assemble_stiffness",
    "assemble_mass",
    "assemble_load",
    "assemble_load_powers",
    "assemble_system",
    "solve",
    "evaluate",
]

COND_LIMIT = 1e14


@dataclass(frozen=True)
class TimeProblem:
    """Scalar fractional initial value problem in physical time s.

    Either `source` g(s) is given directly, or `exact` prescribes a
    manufactured power-sum solution u(s) from which g = D^delta u + lam*u is
    derived in closed form.  A nonzero initial value phi is homogenized
    internally (the derivative annihilates constants), so the solve works on
    u - phi with source g - lam*phi and adds phi back on evaluation.
    """

    delta: FracOrder
    lam: float
    transform: TransformSpec
    source: object = None
    exact: PowerSum | None = None
    phi: float = 0.0

    def __post_init__(self):
        if not self.lam > 0:
            raise DomainError(f"lam must be positive, got {self.lam}")
        if (self.source is None) == (self.exact is None):
            raise DomainError("exactly one of source/exact must be given")
        if self.exact is not None and self.exact.constant != self.phi:
            raise DomainError("manufactured solution must satisfy u(0) = phi")

    @classmethod
    def manufactured(cls, exact: PowerSum, delta, lam, transform) -> "TimeProblem":
        delta = delta if isinstance(delta, FracOrder) else FracOrder(delta)
        return cls(delta, lam, transform, exact=exact, phi=exact.constant)

    @classmethod
    def from_source(cls, g, delta, lam, transform, phi: float = 0.0) -> "TimeProblem":
        delta = delta if isinstance(delta, FracOrder) else FracOrder(delta)
        return cls(delta, lam, transform, source=g, phi=phi)

    def source_transformed(self):
        """Homogenized right-hand side f(t) = g(t^r) - lam*phi."""
        r, lam, phi = self.transform.r, self.lam, self.phi
        if self.exact is not None:
            u = self.exact

            def f(t):
                s = np.asarray(t, dtype=float) ** r
                return u.caputo(self.delta, s) + lam * (u(s) - phi)

            return f
        g = self.source

        def f(t):
            s = np.asarray(t, dtype=float) ** r
            return np.asarray(g(s), dtype=float) - lam * phi

        return f

    def source_power_terms(self):
        """t-side monomials of the homogenized source, or None if not a power sum."""
        if self.exact is None:
            return None
        d, lam, r = self.delta, self.lam, self.transform.r
        terms = []
        for c, e in self.exact.terms:
            terms.append((c * gamma_fn(e + 1.0) / gamma_fn(e + 1.0 - d.delta), r * (e - d.delta)))
            terms.append((lam * c, r * e))
        return tuple(terms)


@dataclass(frozen=True)
class AssembledSystem:
    """Stiffness S, mass M and load F of the Galerkin system (S + lam*M) v = F."""

    S: np.ndarray
    M: np.ndarray
    F: np.ndarray


@dataclass(frozen=True)
class TimeSolution:
    """Galerkin coefficients plus the bookkeeping needed to evaluate u_N(s)."""

    coeffs: np.ndarray
    basis: TimeBasis
    transform: TransformSpec
    phi_offset: float = 0.0
    residual: float = 0.0

    def evaluate(self, s_points):
        return evaluate(self, s_points)


def assemble_stiffness(
    basis: TimeBasis, delta: FracOrder, transform: TransformSpec, quad_n: int
) -> np.ndarray:
    """Stiffness S_mn = (D^{delta,psi} j_n, j_m) in the psi-weighted inner product.

    Unit-interval form: the outer rule absorbs the weight u^((1-delta)r + 1)
    at zero, the inner rule absorbs (1-tau)^(-delta) at one, and the smooth
    factor (sum_k tau^k)^(-delta) is evaluated pointwise.  quad_n points per
    direction keep the only non-exact ingredient (that smooth factor) below
    roundoff for moderate r.
    """
    n_modes = basis.n_modes
    if quad_n < n_modes + 2:
        raise DomainError(f"quad_n must be at least N+2 = {n_modes + 2}, got {quad_n}")
    d = delta.delta
    r = transform.r
    T = transform.horizon_T
    alpha = basis.alpha

    outer = gauss_jacobi_rule(JacobiIndex(0.0, (1.0 - d) * r + 1.0), quad_n, (0.0, 1.0))
    inner = gauss_jacobi_rule(JacobiIndex(-d, 0.0), quad_n, (0.0, 1.0))
    eta, w = outer.nodes, outer.weights
    eta_h, w_h = inner.nodes, inner.weights

    # ((1 - tau^r)/(1 - tau))^(-delta) = (sum_{k<r} tau^k)^(-delta)
    smooth = np.ones_like(eta_h)
    if r > 1:
        acc = np.zeros_like(eta_h)
        for k in range(r):
            acc += eta_h**k
        smooth = acc ** (-d)

    # Inner pass: K[i, n-1] = sum_j w_h[j] smooth[j] J^{alpha+1,0}_{n-1}(2 eta_i eta_h_j - 1)
    args = 2.0 * np.outer(eta, eta_h) - 1.0
    jac_inner = jacobi_table(JacobiIndex(alpha + 1.0, 0.0), n_modes - 1, args.ravel())
    jac_inner = jac_inner.reshape(n_modes, eta.size, eta_h.size)
    K = jac_inner @ (w_h * smooth)  # (n, i)

    jac_outer = jacobi_table(JacobiIndex(alpha, 1.0), n_modes - 1, 2.0 * eta - 1.0)  # (m, i)
    core = (jac_outer * w) @ K.T  # (m, n)

    n_idx = np.arange(1, n_modes + 1, dtype=float)
    pref = 4.0 * n_idx * T ** (1.0 - d) * r / gamma_fn(1.0 - d)
    return core * pref[None, :]


def assemble_mass(basis: TimeBasis, transform: TransformSpec) -> np.ndarray:
    """Mass M_mn = (j_n, j_m) against psi'(t) dt; exact Gauss-Jacobi quadrature."""
    n_modes = basis.n_modes
    r = transform.r
    b = basis.interval[1]
    n_quad = (2 * n_modes + r + 2 + 1) // 2
    rule = gauss_jacobi_rule(JacobiIndex(0.0, float(r - 1)), n_quad, (0.0, b))
    table = gjp_table(basis, rule.nodes)
    weighted = table * rule.weights
    m = r * (weighted @ table.T)
    upper = np.triu(m)
    return upper + np.triu(m, 1).T


def assemble_load(basis: TimeBasis, transform: TransformSpec, f, quad_n: int) -> np.ndarray:
    """Load F_m = (f, j_m) against psi'(t) dt by the (0, r-1) Gauss-Jacobi rule."""
    r = transform.r
    b = basis.interval[1]
    rule = gauss_jacobi_rule(JacobiIndex(0.0, float(r - 1)), quad_n, (0.0, b))
    vals = np.asarray(f(rule.nodes), dtype=float)
    if np.any(np.isnan(vals)):
        raise ValueError("right-hand side returned NaN at a quadrature node")
    table = gjp_table(basis, rule.nodes)
    return r * (table @ (rule.weights * vals))


def assemble_load_powers(
    basis: TimeBasis, transform: TransformSpec, terms
) -> np.ndarray:
    """Load for f(t) = sum c_q t^(p_q), each power absorbed into its own rule.

    Exact for every term (the remaining integrand is the basis polynomial),
    including the endpoint-singular powers p in (-1, 0) produced by
    manufactured solutions with exponent below delta.
    """
    r = transform.r
    b = basis.interval[1]
    n_modes = basis.n_modes
    n_quad = n_modes // 2 + 2
    out = np.zeros(n_modes)
    for c, p in terms:
        beta = p + r - 1.0
        if beta <= -1.0:
            raise DomainError(f"power {p} is not integrable against the weight")
        rule = gauss_jacobi_rule(JacobiIndex(0.0, beta), n_quad, (0.0, b))
        table = gjp_table(basis, rule.nodes)
        out += c * r * (table @ rule.weights)
    return out


def assemble_system(
    problem: TimeProblem, basis: TimeBasis, quad_guard: int = 8
) -> AssembledSystem:
    """Assemble S, M, F for the problem; manufactured power sources load exactly."""
    n_modes = basis.n_modes
    S = assemble_stiffness(basis, problem.delta, problem.transform, n_modes + quad_guard)
    M = assemble_mass(basis, problem.transform)
    power_terms = problem.source_power_terms()
    if power_terms is not None:
        F = assemble_load_powers(basis, problem.transform, power_terms)
    else:
        F = assemble_load(basis, problem.transform, problem.source_transformed(), n_modes + 2 * quad_guard)
    return AssembledSystem(S, M, F)


def solve_linear(A: np.ndarray, F: np.ndarray) -> tuple[np.ndarray, float]:
    """Dense LU solve with a condition guard and one refinement step."""
    cond = np.linalg.cond(A)
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise NumericalFailureError(f"system condition estimate {cond:.3e} exceeds {COND_LIMIT:.0e}")
    x = np.linalg.solve(A, F)
    scale = np.max(np.abs(F)) if F.size else 0.0
    residual = np.max(np.abs(A @ x - F))
    if scale > 0 and residual > 1e-12 * scale:
        x = x + np.linalg.solve(A, F - A @ x)
        residual = np.max(np.abs(A @ x - F))
    return x, float(residual)


def solve(problem: TimeProblem, basis: TimeBasis, quad_guard: int = 8) -> TimeSolution:
    """Solve (S + lam*M) v = F and package the coefficients."""
    system = assemble_system(problem, basis, quad_guard)
    A = system.S + problem.lam * system.M
    coeffs, residual = solve_linear(A, system.F)
    return TimeSolution(
        coeffs=coeffs,
        basis=basis,
        transform=problem.transform,
        phi_offset=problem.phi,
        residual=residual,
    )


def evaluate(sol: TimeSolution, s_points) -> np.ndarray:
    """Evaluate u_N(s) = phi + sum_n v_n j_n(s^gamma) on points in [0, T]."""
    s = np.atleast_1d(np.asarray(s_points, dtype=float))
    T = sol.transform.horizon_T
    if np.any(s < 0) or np.any(s > T * (1 + 1e-12)):
        bad = s[(s < 0) | (s > T * (1 + 1e-12))][0]
        raise DomainError(f"evaluation point {bad} outside [0, {T}]")
    t = s ** (1.0 / sol.transform.r)
    table = gjp_table(sol.basis, t)
    vals = sol.phi_offset + sol.coeffs @ table
    return vals
