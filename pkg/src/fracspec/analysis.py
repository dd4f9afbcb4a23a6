"""Error measurement and convergence-study harness.

Produces the machine-readable error tables behind the reported experiments:
uniform-grid maximum errors, quadrature-based L2 errors, and resolution
sweeps with optional self-reference when no exact solution is known.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, StudyError
from .frac_ops import TransformSpec
from .ode_solver import TimeProblem, TimeSolution, solve
from .orthopoly import TimeBasis
from .parallel import map_indexed

__all__ = [
    "ErrorReport",
    "ConvergenceStudy",
    "StudyRequest",
    "error_linf",
    "error_l2",
    "self_convergence_reference",
    "run_convergence_study",
    "run_pde_convergence_study",
    "pde_errors_at_final_time",
]

LINF_GRID = 1001
L2_PANELS = 20
L2_POINTS_PER_PANEL = 10


@dataclass(frozen=True)
class ErrorReport:
    """Errors and wall-clock time of one solve at a given resolution."""

    n_modes: int
    linf_error: float
    l2_error: float
    runtime_ms: float
    m_modes: int | None = None

    def __post_init__(self):
        if self.linf_error < 0 or self.l2_error < 0:
            raise DomainError("errors must be nonnegative")


@dataclass(frozen=True)
class ConvergenceStudy:
    """Ordered error reports for one problem and parameter set."""

    problem_id: str
    parameters: dict
    reports: tuple[ErrorReport, ...]

    def __post_init__(self):
        pairs = [(r.n_modes, r.m_modes if r.m_modes is not None else 0) for r in self.reports]
        for (n0, m0), (n1, m1) in zip(pairs, pairs[1:]):
            increasing = (n1 > n0 and m1 >= m0) or (m1 > m0 and n1 >= n0)
            if not increasing:
                raise DomainError("resolutions must be strictly increasing")

    def csv_rows(self) -> list[str]:
        with_m = any(r.m_modes is not None for r in self.reports)
        header = "N,M,linf_error,l2_error,runtime_ms" if with_m else "N,linf_error,l2_error,runtime_ms"
        rows = [header]
        for r in self.reports:
            cells = [str(r.n_modes)]
            if with_m:
                cells.append(str(r.m_modes))
            cells += [f"{r.linf_error:.16e}", f"{r.l2_error:.16e}", f"{r.runtime_ms:.3f}"]
            rows.append(",".join(cells))
        return rows


def _composite_gl(lo: float, hi: float, panels: int, per_panel: int):
    x0, w0 = np.polynomial.legendre.leggauss(per_panel)
    edges = np.linspace(lo, hi, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    nodes = (mid[:, None] + half[:, None] * x0[None, :]).ravel()
    weights = (half[:, None] * w0[None, :]).ravel()
    return nodes, weights


def error_linf(sol: TimeSolution, exact, grid_n: int = LINF_GRID) -> float:
    """Max |u_N - u| over a uniform s-grid including both endpoints."""
    if grid_n < 2:
        raise DomainError(f"grid must have at least 2 points, got {grid_n}")
    s = np.linspace(0.0, sol.transform.horizon_T, grid_n)
    return float(np.max(np.abs(sol.evaluate(s) - np.asarray(exact(s), dtype=float))))


def error_l2(
    sol: TimeSolution,
    exact,
    transform: TransformSpec | None = None,
    weighted: bool = False,
) -> float:
    """L2 error by 200-point composite Gauss-Legendre quadrature.

    Default: plain L2 in the physical variable s on (0, T).  With
    weighted=True the same norm is evaluated in the rescaled variable t
    against psi'(t) dt; the two agree analytically and differ only in
    sampling.
    """
    transform = transform if transform is not None else sol.transform
    if weighted:
        b = transform.b_psi
        t, w = _composite_gl(0.0, b, L2_PANELS, L2_POINTS_PER_PANEL)
        s = t**transform.r
        diff = sol.evaluate(s) - np.asarray(exact(s), dtype=float)
        return float(np.sqrt(np.sum(w * transform.psi_prime(t) * diff * diff)))
    s, w = _composite_gl(0.0, transform.horizon_T, L2_PANELS, L2_POINTS_PER_PANEL)
    diff = sol.evaluate(s) - np.asarray(exact(s), dtype=float)
    return float(np.sqrt(np.sum(w * diff * diff)))


def self_convergence_reference(problem: TimeProblem, n_ref: int, alpha: float = 0.0) -> TimeSolution:
    """High-resolution solve used as a surrogate exact solution."""
    basis = TimeBasis(alpha, n_ref, (0.0, problem.transform.b_psi))
    return solve(problem, basis)


@dataclass(frozen=True)
class StudyRequest:
    """Specification of a resolution sweep for one time problem."""

    problem_id: str
    problem: TimeProblem
    n_values: tuple[int, ...]
    exact: object = None
    ref_n: int | None = None
    alpha: float = 0.0
    weighted_l2: bool = False
    linf_grid: int = LINF_GRID

    def __post_init__(self):
        if len(self.n_values) == 0:
            raise DomainError("need at least one resolution")
        if (self.exact is None) and (self.ref_n is None):
            raise DomainError("studies need an exact solution or a reference resolution")
        if self.ref_n is not None and self.exact is None:
            if self.ref_n < 2 * max(self.n_values):
                raise DomainError(
                    f"reference resolution {self.ref_n} must be at least twice the largest N"
                )


def run_convergence_study(request: StudyRequest) -> ConvergenceStudy:
    """Solve at every resolution and collect error reports, smallest N first.

    Any member failure aborts the study; the completed reports travel on the
    raised StudyError so partial progress is never silently discarded.
    """
    n_values = tuple(sorted(request.n_values))
    problem = request.problem
    exact = request.exact
    if exact is None:
        ref = self_convergence_reference(problem, request.ref_n, request.alpha)
        exact = ref.evaluate

    b = problem.transform.b_psi
    done: list[ErrorReport] = []

    def member(i: int) -> ErrorReport:
        n = n_values[i]
        start = time.perf_counter()
        sol = solve(problem, TimeBasis(request.alpha, n, (0.0, b)))
        runtime = (time.perf_counter() - start) * 1e3
        return ErrorReport(
            n_modes=n,
            linf_error=error_linf(sol, exact, request.linf_grid),
            l2_error=error_l2(sol, exact, problem.transform, request.weighted_l2),
            runtime_ms=runtime,
        )

    try:
        for _, report in map_indexed(member, len(n_values)):
            done.append(report)
    except Exception as exc:
        partial = ConvergenceStudy(request.problem_id, _params_of(problem), tuple(done))
        raise StudyError(f"study member failed: {exc}", partial=partial) from exc
    return ConvergenceStudy(request.problem_id, _params_of(problem), tuple(done))


def _params_of(problem: TimeProblem) -> dict:
    return {
        "delta": problem.delta.delta,
        "r": problem.transform.r,
        "lambda": problem.lam,
        "T": problem.transform.horizon_T,
    }


def pde_errors_at_final_time(sol, exact, grid_n: int = 33) -> tuple[float, float]:
    """Grid max error and spatial L2 error at s = T for a 2-d solution."""
    T = sol.transform.horizon_T
    xg = np.linspace(-1.0, 1.0, grid_n)
    diff = sol.evaluate(xg, xg, [T]) - exact(xg, xg, [T])
    linf = float(np.max(np.abs(diff)))
    xq, wq = np.polynomial.legendre.leggauss(40)
    dq = sol.evaluate(xq, xq, [T]) - exact(xq, xq, [T])
    l2 = float(np.sqrt(np.einsum("a,b,abc->", wq, wq, dq * dq)))
    return linf, l2


def run_pde_convergence_study(
    problem_id: str,
    problem,
    exact,
    n_values: tuple[int, ...],
    m_values: tuple[int, ...],
    alpha: float = 0.0,
    quad_guard: int = 8,
) -> ConvergenceStudy:
    """Sweep (N, M) pairs of a space-time problem; lists must have equal length."""
    from .pde_solver import SpatialBasis, solve_spacetime

    if len(n_values) != len(m_values):
        raise DomainError("need matching N and M lists (equal length)")
    done: list[ErrorReport] = []
    b = problem.transform.b_psi

    def member(i: int) -> ErrorReport:
        n, m = n_values[i], m_values[i]
        start = time.perf_counter()
        sol = solve_spacetime(
            problem, TimeBasis(alpha, n, (0.0, b)), SpatialBasis(m, problem.dimension), quad_guard
        )
        runtime = (time.perf_counter() - start) * 1e3
        linf, l2 = pde_errors_at_final_time(sol, exact)
        return ErrorReport(n_modes=n, m_modes=m, linf_error=linf, l2_error=l2, runtime_ms=runtime)

    try:
        for _, report in map_indexed(member, len(n_values)):
            done.append(report)
    except Exception as exc:
        partial = ConvergenceStudy(problem_id, _params_of_pde(problem), tuple(done))
        raise StudyError(f"study member failed: {exc}", partial=partial) from exc
    return ConvergenceStudy(problem_id, _params_of_pde(problem), tuple(done))


def _params_of_pde(problem) -> dict:
    return {
        "delta": problem.delta.delta,
        "r": problem.transform.r,
        "T": problem.transform.horizon_T,
        "dimension": problem.dimension,
    }
