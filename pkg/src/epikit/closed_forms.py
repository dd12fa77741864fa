"""Exact solutions: the SI (logistic) model and the modified SIR model.

The SI model is parameterised in physical time ``t`` with infection rate
``b``.  Its solution is the logistic distribution function
``I = 1/2 + tanh(b (t - t*) / 2) / 2``.

The modified SIR model, started from ``S0 = 1``, reduces to a logistic
equation for ``R / R_inf`` with rate ``r0 - 1``; I is then a sech^2 pulse
centred on the peak time ``tau*``.

Note: the SI model is the ``a -> 0`` limit of SIR with ``b`` fixed, but the
limit is far from uniform in time; it only describes the early rise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, NamedTuple, Tuple

import numpy as np

from .analysis import final_size
from .errors import DomainError
from .integrator import IntegratorConfig, integrate
from .model import ModelKind, ModelParams


def _sech2(x: float) -> float:
    # 1/cosh^2 without overflow for large |x|
    ax = abs(x)
    if ax > 350.0:
        return 4.0 * math.exp(-2.0 * ax)
    c = math.cosh(ax)
    return 1.0 / (c * c)


@dataclass(frozen=True)
class LogisticSolution:
    b: float
    t_star: float = 0.0

    def __post_init__(self) -> None:
        if not self.b > 0:
            raise DomainError(f"b must be positive, got {self.b}")

    @classmethod
    def from_initial(cls, b: float, i0: float, t0: float = 0.0) -> "LogisticSolution":
        """The solution with ``I(t0) = i0``."""
        if not 0.0 < i0 < 1.0:
            raise DomainError(f"i0 must lie in (0, 1), got {i0}")
        return cls(b, t0 - math.log(i0 / (1.0 - i0)) / b)


def si_solution(sol: LogisticSolution, t: float) -> Tuple[float, float]:
    """``(I, dI/dt)`` of the SI model at time ``t``."""
    x = 0.5 * sol.b * (t - sol.t_star)
    return 0.5 + 0.5 * math.tanh(x), 0.25 * sol.b * _sech2(x)


def si_time_of_i(sol: LogisticSolution, i: float) -> float:
    if not 0.0 < i < 1.0:
        raise DomainError(f"I must lie strictly between 0 and 1, got {i!r}")
    return sol.t_star + math.log(i / (1.0 - i)) / sol.b


@dataclass(frozen=True)
class ModifiedClosedForm:
    r0: float
    tau_star: float = 0.0

    def __post_init__(self) -> None:
        if not self.r0 > 1.0:
            raise DomainError(f"the modified model needs r0 > 1, got {self.r0}")


class ModifiedFinalValues(NamedTuple):
    r_inf: float
    i_peak: float


def modified_final_values(r0: float) -> ModifiedFinalValues:
    """Limiting removed proportion and peak infection of the modified model."""
    if not r0 > 1.0:
        raise DomainError(f"the modified model needs r0 > 1, got {r0}")
    q = 1.0 - 1.0 / r0
    return ModifiedFinalValues(2.0 * q / r0, 0.5 * q * q)


def modified_solution(cf: ModifiedClosedForm, tau: float) -> Tuple[float, float, float]:
    """``(S, I, R)`` of the modified model at rescaled time ``tau``."""
    r0 = cf.r0
    q = 1.0 - 1.0 / r0
    x = 0.5 * (r0 - 1.0) * (tau - cf.tau_star)
    r = (q / r0) * (1.0 + math.tanh(x))
    i = 0.5 * q * q * _sech2(x)
    return 1.0 - i - r, i, r


def calibrate_tau_star(r0: float, i0: float) -> ModifiedClosedForm:
    """Place the peak so that the pre-peak branch passes through ``I(0) = i0``."""
    i_peak = modified_final_values(r0).i_peak
    if not 0.0 < i0 <= i_peak:
        raise DomainError(f"i0 must lie in (0, {i_peak!r}] to reach the peak, got {i0!r}")
    if i0 == i_peak:
        return ModifiedClosedForm(r0, 0.0)
    return ModifiedClosedForm(r0, 2.0 / (r0 - 1.0) * math.acosh(math.sqrt(i_peak / i0)))


@dataclass(frozen=True)
class ModelComparison:
    tau: np.ndarray
    i_sir: np.ndarray
    i_modified: np.ndarray
    closed_form: ModifiedClosedForm
    max_abs_diff: float
    r_final_sir: float
    r_final_modified: float

    def rows(self) -> List[Tuple[float, float, float]]:
        return list(zip(self.tau.tolist(), self.i_sir.tolist(), self.i_modified.tolist()))


def compare_models(
    r0: float, i0: float, config: IntegratorConfig | None = None
) -> ModelComparison:
    """Integrated SIR infection curve against the calibrated modified closed form.

    Both curves are sampled on the SIR integration grid.  The final values are
    the SIR final size (root of the final-size equation) and the modified
    model's ``2 (1/r0)(1 - 1/r0)``.
    """
    params = ModelParams(r0, i0=i0)
    if r0 * params.s0 <= 1.0:
        raise DomainError(f"comparison needs r0*S0 > 1, got r0={r0}, S0={params.s0}")
    traj = integrate(params, ModelKind.SIR, config)
    cf = calibrate_tau_star(r0, i0)
    i_mod = np.array([modified_solution(cf, float(t))[1] for t in traj.tau])
    return ModelComparison(
        tau=traj.tau,
        i_sir=traj.i,
        i_modified=i_mod,
        closed_form=cf,
        max_abs_diff=float(np.max(np.abs(traj.i - i_mod))),
        r_final_sir=final_size(params).r_inf,
        r_final_modified=modified_final_values(r0).r_inf,
    )
