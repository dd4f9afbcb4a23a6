"""Jacobi/Legendre polynomials, boundary-adapted bases and Gauss-Jacobi rules.

Conventions: Jacobi polynomials J^{a,b}_n are orthogonal on (-1, 1) against
the weight (1-x)^a (1+x)^b with a, b > -1.  Rules on a general interval
(lo, hi) absorb the affinely mapped weight (hi-x)^a (x-lo)^b.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import DomainError, NumericalFailureError

__all__ = [
    "JacobiIndex",
    "QuadratureRule",
    "TimeBasis",
    "jacobi_eval",
    "jacobi_deriv",
    "jacobi_table",
    "jacobi_weight_integral",
    "gauss_jacobi_rule",
    "gjp_eval",
    "gjp_deriv",
    "gjp_table",
    "gjp_deriv_table",
    "legendre_phi",
    "legendre_phi_table",
]


@dataclass(frozen=True)
class JacobiIndex:
    """Weight exponents (alpha, beta) of a Jacobi family; both must be > -1."""

    alpha: float
    beta: float

    def __post_init__(self):
        if not (self.alpha > -1.0 and self.beta > -1.0):
            raise DomainError(
                f"Jacobi exponents must both exceed -1, got ({self.alpha}, {self.beta})"
            )


def jacobi_weight_integral(idx: JacobiIndex) -> float:
    """Total mass of (1-x)^a (1+x)^b on (-1, 1): 2^(a+b+1) B(a+1, b+1)."""
    a, b = idx.alpha, idx.beta
    log_beta = math.lgamma(a + 1) + math.lgamma(b + 1) - math.lgamma(a + b + 2)
    return 2.0 ** (a + b + 1) * math.exp(log_beta)


def jacobi_table(idx: JacobiIndex, n_max: int, x) -> np.ndarray:
    """Values of J^{a,b}_0..J^{a,b}_{n_max} at x, shape (n_max+1, len(x)).

    Three-term recurrence; stable for the parameter ranges used here.
    """
    a, b = idx.alpha, idx.beta
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty((n_max + 1, x.size))
    out[0] = 1.0
    if n_max == 0:
        return out
    out[1] = 0.5 * (a + b + 2) * x + 0.5 * (a - b)
    for n in range(1, n_max):
        c = 2 * n + a + b
        a1 = 2 * (n + 1) * (n + a + b + 1) * c
        a2 = (c + 1) * (a * a - b * b)
        a3 = c * (c + 1) * (c + 2)
        a4 = 2 * (n + a) * (n + b) * (c + 2)
        out[n + 1] = ((a2 + a3 * x) * out[n] - a4 * out[n - 1]) / a1
    return out


def jacobi_eval(idx: JacobiIndex, n: int, x):
    """Evaluate J^{a,b}_n(x).  |x| > 1 is permitted but is extrapolation."""
    if n < 0:
        raise DomainError(f"polynomial degree must be >= 0, got {n}")
    table = jacobi_table(idx, n, x)
    vals = table[n]
    return float(vals[0]) if np.isscalar(x) else vals


def jacobi_deriv(idx: JacobiIndex, n: int, x):
    """d/dx J^{a,b}_n(x) = (n+a+b+1)/2 * J^{a+1,b+1}_{n-1}(x)."""
    if n < 0:
        raise DomainError(f"polynomial degree must be >= 0, got {n}")
    if n == 0:
        return 0.0 if np.isscalar(x) else np.zeros_like(np.asarray(x, dtype=float))
    shifted = JacobiIndex(idx.alpha + 1, idx.beta + 1)
    factor = 0.5 * (n + idx.alpha + idx.beta + 1)
    val = jacobi_eval(shifted, n - 1, x)
    return factor * val


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss-Jacobi rule: nodes/weights for the mapped weight on (lo, hi)."""

    nodes: np.ndarray
    weights: np.ndarray
    interval: tuple[float, float]
    index: JacobiIndex

    def __post_init__(self):
        lo, hi = self.interval
        nodes, weights = self.nodes, self.weights
        if nodes.shape != weights.shape or nodes.ndim != 1:
            raise ValueError("nodes and weights must be 1-d arrays of equal length")
        if not np.all(np.diff(nodes) > 0):
            raise NumericalFailureError("quadrature nodes are not strictly increasing")
        if not (nodes[0] > lo and nodes[-1] < hi):
            raise NumericalFailureError("quadrature nodes escaped the open interval")
        if not np.all(weights > 0):
            raise NumericalFailureError("quadrature weights are not all positive")
        scale = (0.5 * (hi - lo)) ** (self.index.alpha + self.index.beta + 1)
        total = jacobi_weight_integral(self.index) * scale
        if abs(weights.sum() - total) > 1e-12 * max(total, 1.0):
            raise NumericalFailureError(
                f"weight sum {weights.sum():.17g} disagrees with closed form {total:.17g}"
            )

    @property
    def n_points(self) -> int:
        return self.nodes.size


def _jacobi_recurrence(a: float, b: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Diagonal and off-diagonal of the symmetric Jacobi matrix, n x n."""
    k = np.arange(1, n, dtype=float)
    diag = np.empty(n)
    diag[0] = (b - a) / (a + b + 2)
    diag[1:] = (b * b - a * a) / ((2 * k + a + b) * (2 * k + a + b + 2))
    off = np.empty(max(n - 1, 0))
    if n > 1:
        off[0] = math.sqrt(4 * (a + 1) * (b + 1) / ((a + b + 2) ** 2 * (a + b + 3)))
        kk = np.arange(2, n, dtype=float)
        num = 4 * kk * (kk + a) * (kk + b) * (kk + a + b)
        den = (2 * kk + a + b) ** 2 * (2 * kk + a + b + 1) * (2 * kk + a + b - 1)
        off[1:] = np.sqrt(num / den)
    return diag, off


def _gauss_weights(idx: JacobiIndex, n: int, nodes: np.ndarray) -> np.ndarray:
    """Closed-form Gauss-Jacobi weights at exact nodes of J^{a,b}_n."""
    a, b = idx.alpha, idx.beta
    logc = (
        (a + b + 1) * math.log(2.0)
        + math.lgamma(n + a + 1)
        + math.lgamma(n + b + 1)
        - math.lgamma(n + 1)
        - math.lgamma(n + a + b + 1)
    )
    dpn = jacobi_deriv(idx, n, nodes)
    return math.exp(logc) / ((1.0 - nodes * nodes) * dpn * dpn)


def gauss_jacobi_rule(
    idx: JacobiIndex, n: int, interval: tuple[float, float] = (-1.0, 1.0)
) -> QuadratureRule:
    """n-point Gauss-Jacobi rule, exact for degree <= 2n-1 against the weight.

    Nodes come from the Golub-Welsch eigenproblem of the three-term
    recurrence, then each is polished by Newton iteration on J^{a,b}_n.
    """
    if n < 1:
        raise DomainError(f"rule size must be >= 1, got {n}")
    lo, hi = interval
    if not hi > lo:
        raise DomainError(f"empty interval {interval}")
    a, b = idx.alpha, idx.beta
    diag, off = _jacobi_recurrence(a, b, n)
    try:
        nodes, _ = eigh_tridiagonal(diag, off)
    except Exception as exc:  # pragma: no cover - LAPACK failure is exotic
        raise NumericalFailureError(f"tridiagonal eigensolve failed: {exc}") from exc
    nodes = np.sort(nodes)
    # Newton polish: a couple of steps reach the attainable floor.
    for _ in range(4):
        p = jacobi_eval(idx, n, nodes)
        dp = jacobi_deriv(idx, n, nodes)
        step = p / dp
        nodes = nodes - step
        if np.max(np.abs(step)) < 1e-15:
            break
    residual = np.abs(jacobi_eval(idx, n, nodes) / jacobi_deriv(idx, n, nodes))
    if np.max(residual) > 1e-13:
        raise NumericalFailureError(
            f"Newton refinement stalled, max node residual {np.max(residual):.3e}",
            estimate=nodes,
            error_bound=float(np.max(residual)),
        )
    weights = _gauss_weights(idx, n, nodes)
    half = 0.5 * (hi - lo)
    mapped = lo + half * (nodes + 1.0)
    mapped_w = weights * half ** (a + b + 1)
    return QuadratureRule(mapped, mapped_w, (lo, hi), idx)


@dataclass(frozen=True)
class TimeBasis:
    """Boundary-adapted Jacobi basis on (0, b): n-th function vanishes at 0.

    Functions are j_n(t) = (1 + x(t)) J^{alpha,1}_{n-1}(x(t)), n = 1..N,
    with x(t) the affine map of the interval onto (-1, 1).  Their span is
    every polynomial of degree <= N vanishing at the left endpoint.
    """

    alpha: float
    n_modes: int
    interval: tuple[float, float]

    def __post_init__(self):
        if not self.alpha > -1.0:
            raise DomainError(f"basis parameter must exceed -1, got {self.alpha}")
        if self.n_modes < 1:
            raise DomainError(f"need at least one mode, got {self.n_modes}")
        lo, hi = self.interval
        if not hi > lo:
            raise DomainError(f"empty interval {self.interval}")

    def to_reference(self, t) -> np.ndarray:
        lo, hi = self.interval
        t = np.asarray(t, dtype=float)
        return (2.0 * t - (lo + hi)) / (hi - lo)


def _check_mode(basis: TimeBasis, n: int):
    if not 1 <= n <= basis.n_modes:
        raise DomainError(f"mode index must lie in 1..{basis.n_modes}, got {n}")


def gjp_table(basis: TimeBasis, t) -> np.ndarray:
    """Values of j_1..j_N at t, shape (N, len(t))."""
    x = np.atleast_1d(basis.to_reference(t))
    jac = jacobi_table(JacobiIndex(basis.alpha, 1.0), basis.n_modes - 1, x)
    return (1.0 + x) * jac


def gjp_deriv_table(basis: TimeBasis, t) -> np.ndarray:
    """Values of j_1'..j_N' at t, shape (N, len(t))."""
    lo, hi = basis.interval
    x = np.atleast_1d(basis.to_reference(t))
    jac = jacobi_table(JacobiIndex(basis.alpha + 1.0, 0.0), basis.n_modes - 1, x)
    n = np.arange(1, basis.n_modes + 1, dtype=float)[:, None]
    return (2.0 * n / (hi - lo)) * jac


def gjp_eval(basis: TimeBasis, n: int, t):
    """j_n(t) = (1 + x(t)) J^{alpha,1}_{n-1}(x(t))."""
    _check_mode(basis, n)
    x = basis.to_reference(t)
    val = (1.0 + x) * jacobi_eval(JacobiIndex(basis.alpha, 1.0), n - 1, x)
    return float(val) if np.isscalar(t) else val


def gjp_deriv(basis: TimeBasis, n: int, t):
    """j_n'(t) = 2n/(hi-lo) * J^{alpha+1,0}_{n-1}(x(t))."""
    _check_mode(basis, n)
    lo, hi = basis.interval
    x = basis.to_reference(t)
    val = (2.0 * n / (hi - lo)) * jacobi_eval(JacobiIndex(basis.alpha + 1.0, 0.0), n - 1, x)
    return float(val) if np.isscalar(t) else val


def legendre_phi(k: int, x):
    """Dirichlet Legendre combination c_k (L_k - L_{k+2}); zero at x = +-1."""
    if k < 0:
        raise DomainError(f"mode index must be >= 0, got {k}")
    table = legendre_phi_table(k + 2, x)
    vals = table[k]
    return float(vals[0]) if np.isscalar(x) else vals


def legendre_phi_table(m_modes: int, x) -> np.ndarray:
    """Values of phi_0..phi_{M-2} at x, shape (M-1, len(x))."""
    if m_modes < 2:
        raise DomainError(f"need m_modes >= 2, got {m_modes}")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    leg = jacobi_table(JacobiIndex(0.0, 0.0), m_modes, x)
    k = np.arange(m_modes - 1, dtype=float)
    c = 1.0 / np.sqrt(4.0 * k + 6.0)
    return c[:, None] * (leg[: m_modes - 1] - leg[2 : m_modes + 1])
