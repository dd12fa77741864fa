"""Closed-form and root-finding analytics of the SIR model.

Peak values, the final-size equation ``1 - R = S0 * exp(-r0 R)``, the point
of fastest growth of new infections, the extrema of ``dI/dtau``, and the
time at which S reaches a given level by quadrature along the orbit.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Iterator, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from .errors import ConvergenceError, DomainError, NoEpidemicError
from .integrator import PeakOfI, Trajectory, locate_event
from .model import PARAM_TOL, ModelParams
from .quadrature import adaptive_quad

ROOT_TOL = 1e-12
QUAD_TOL = 1e-10
FIXED_POINT_STEP = 1e-14
MAX_FIXED_POINT_ITER = 10**6
MAX_BISECTIONS = 200
# tau_of_s refuses targets this close to S_inf, where 1/I blows up.
S_INF_GUARD = 1e-6


class FinalSizeMethod(str, enum.Enum):
    FIXED_POINT = "fixed-point"
    BISECTION = "bisection"


@dataclass(frozen=True)
class PeakReport:
    s_star: float
    i_star: float
    r_star: float
    tau_star: Optional[float] = None


@dataclass(frozen=True)
class FinalSizeReport:
    s_inf: float
    r_inf: float
    iterations: int
    method: FinalSizeMethod
    residual: float


class FastestIncrease(NamedTuple):
    s_at_max: float
    i_at_max: float
    rate_max: float


class IRateExtrema(NamedTuple):
    s_at_dImax: float
    s_at_dImin: float


class RStarExtremum(NamedTuple):
    argmax_r0: float
    max_r_star: float
    analytic_max: float


def bisect(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    xtol: float = ROOT_TOL,
    max_iter: int = MAX_BISECTIONS,
) -> Tuple[float, int]:
    """Bracketing bisection; returns ``(root, iterations)``.

    ``f(lo)`` and ``f(hi)`` must differ in sign.  Iteration stops when the
    bracket is narrower than ``xtol`` or can no longer be split in floating
    point (``xtol=0`` asks for the latter).
    """
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo, 0
    if fhi == 0.0:
        return hi, 0
    if (flo > 0) == (fhi > 0):
        raise DomainError(f"no sign change on [{lo!r}, {hi!r}]")
    for n in range(1, max_iter + 1):
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            return mid, n
        fm = f(mid)
        if fm == 0.0:
            return mid, n
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
        if hi - lo < xtol:
            return 0.5 * (lo + hi), n
    raise ConvergenceError(f"bisection did not converge in {max_iter} steps")


def _require_epidemic(params: ModelParams) -> None:
    if params.r0 * params.s0 <= 1.0:
        raise NoEpidemicError("no epidemic: r0*S0 <= 1")


def _orbit_i(s: float, params: ModelParams) -> float:
    # I(S) on the orbit, unchecked; see model.i_of_s
    return params.i0 + (params.s0 - s) + math.log1p((s - params.s0) / params.s0) / params.r0


def peak_values(params: ModelParams, trajectory: Trajectory | None = None) -> PeakReport:
    """S, I, R at peak infection, where ``r0 * S = 1``.

    At ``r0 * S0 = 1`` (to 1e-12) the degenerate peak is the initial state.
    With a ``trajectory`` the peak time is located on it as well.
    """
    r0, s0 = params.r0, params.s0
    if r0 * s0 < 1.0 - PARAM_TOL:
        raise NoEpidemicError("no epidemic: r0*S0 <= 1")
    s_star = 1.0 / r0
    r_star = max(0.0, math.log(r0 * s0) / r0)
    i_star = 1.0 - s_star - r_star
    tau_star = None
    if trajectory is not None:
        tau_star, _ = locate_event(trajectory, PeakOfI())
    return PeakReport(s_star, i_star, r_star, tau_star)


def _final_size_residual(r: float, params: ModelParams) -> float:
    return 1.0 - r - params.s0 * math.exp(-params.r0 * r)


def fixed_point_iterates(params: ModelParams, step_tol: float = FIXED_POINT_STEP) -> Iterator[float]:
    """Iterates of ``R <- 1 - S0 exp(-r0 R)`` starting from ``1 - 1/r0``.

    Yields the start value and each iterate, stopping once two successive
    iterates differ by less than ``step_tol``.
    """
    _require_epidemic(params)
    r0, s0 = params.r0, params.s0
    r = 1.0 - 1.0 / r0
    yield r
    for _ in range(MAX_FIXED_POINT_ITER):
        nxt = 1.0 - s0 * math.exp(-r0 * r)
        yield nxt
        if abs(nxt - r) < step_tol:
            return
        r = nxt
    raise ConvergenceError(f"fixed-point iteration did not converge in {MAX_FIXED_POINT_ITER} steps")


def final_size(
    params: ModelParams, method: FinalSizeMethod | str = FinalSizeMethod.BISECTION
) -> FinalSizeReport:
    """Solve ``1 - R = S0 exp(-r0 R)`` for the final removed proportion."""
    method = FinalSizeMethod(method)
    if method is FinalSizeMethod.FIXED_POINT:
        iterates = list(fixed_point_iterates(params))
        r_inf, iterations = iterates[-1], len(iterates) - 1
    else:
        lo = max(params.i0, 1.0 - 1.0 / params.r0)
        hi = 1.0 - 1e-16
        if _final_size_residual(lo, params) <= 0.0:
            # only reachable with i0 = 0 and r0*S0 <= 1: nobody is ever infected
            r_inf, iterations = lo, 0
        else:
            r_inf, iterations = bisect(lambda r: _final_size_residual(r, params), lo, hi, xtol=0.0)
    return FinalSizeReport(
        s_inf=1.0 - r_inf,
        r_inf=r_inf,
        iterations=iterations,
        method=method,
        residual=abs(_final_size_residual(r_inf, params)),
    )


def final_size_sweep(r0_grid: Sequence[float], s0: float) -> List[Tuple[float, float]]:
    """``(r0, R_inf)`` for every grid value, sorted by r0 (bisection throughout)."""
    out = []
    for r0 in r0_grid:
        try:
            report = final_size(ModelParams(float(r0), s0=s0), FinalSizeMethod.BISECTION)
        except Exception as exc:
            raise type(exc)(f"r0={r0}: {exc}") from exc
        out.append((float(r0), report.r_inf))
    out.sort(key=lambda row: row[0])
    return out


def fastest_new_infections(params: ModelParams) -> FastestIncrease:
    """Where ``-dS/dtau`` peaks: the root of ``r0 I(S) = r0 S - 1`` in ``(1/r0, s0)``.

    When i0 is so large that no root lies in the bracket the new-infection
    rate is already falling at ``tau = 0``, and the initial state is returned.
    """
    _require_epidemic(params)
    r0, s0 = params.r0, params.s0

    def gap(s: float) -> float:
        return r0 * _orbit_i(s, params) - (r0 * s - 1.0)

    if gap(s0) >= 0.0:
        return FastestIncrease(s0, params.i0, r0 * s0 * params.i0)
    s, _ = bisect(gap, 1.0 / r0, s0)
    return FastestIncrease(s, s - 1.0 / r0, s * (r0 * s - 1.0))


def _inflection_gap(s: float, params: ModelParams) -> float:
    # zero where d2I/dtau2 = 0 on the orbit
    r0 = params.r0
    return (r0 * s - 1.0) ** 2 - r0 * r0 * s * _orbit_i(s, params)


def i_rate_extrema(params: ModelParams) -> IRateExtrema:
    """S values where ``dI/dtau`` is largest (before the peak) and smallest (after).

    Both solve ``(r0 S - 1)^2 = r0^2 S I(S)``; one root lies on each side of
    ``S* = 1/r0``.
    """
    _require_epidemic(params)
    r0, s0 = params.r0, params.s0
    s_star = 1.0 / r0

    def g(s: float) -> float:
        return _inflection_gap(s, params)

    if g(s0) <= 0.0:
        s_max = s0
    else:
        s_max, _ = bisect(g, s_star, s0)
    s_inf = final_size(params).s_inf
    s_min, _ = bisect(g, s_inf, s_star)
    return IRateExtrema(s_max, s_min)


def tau_of_s(s_target: float, params: ModelParams, tol: float = QUAD_TOL) -> float:
    """Rescaled time at which S has fallen to ``s_target``.

    Integrates ``dtau = -dS / (r0 S I(S))`` from ``s0`` down to the target.
    """
    s0 = params.s0
    s_inf = final_size(params).s_inf
    if not s_inf + S_INF_GUARD <= s_target <= s0:
        raise DomainError(
            f"s_target must lie in [S_inf + {S_INF_GUARD:g}, s0] = "
            f"[{s_inf + S_INF_GUARD!r}, {s0!r}], got {s_target!r}"
        )
    if s_target == s0:
        return 0.0
    r0 = params.r0

    def integrand(s: float) -> float:
        return 1.0 / (r0 * s * _orbit_i(s, params))

    value, _ = adaptive_quad(integrand, s_target, s0, tol=tol)
    return value


def r_star_curve(r0: np.ndarray, s0: float) -> np.ndarray:
    """Removed proportion at peak infection, ``ln(r0 S0) / r0``, over an r0 array."""
    r0 = np.asarray(r0, dtype=float)
    return np.log(r0 * s0) / r0


def r_star_extremum_check(s0: float, r0_grid: Sequence[float]) -> RStarExtremum:
    """Grid maximiser of R*(r0), plus the analytic maximum ``R*(e/S0) = S0/e``."""
    grid = np.asarray(r0_grid, dtype=float)
    values = r_star_curve(grid, s0)
    k = int(np.argmax(values))
    analytic = float(r_star_curve(np.array([math.e / s0]), s0)[0])
    return RStarExtremum(float(grid[k]), float(values[k]), analytic)
