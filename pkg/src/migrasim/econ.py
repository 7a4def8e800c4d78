"""Dual-sector economy: wages, farm income, relative price and the expected
wage differential that forces the intention dynamics.

All functions are pure and take the urban head-count ``n_u`` as a real
number so they can be evaluated off the integer grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ._validation import ParameterError


class EconDomainError(ParameterError):
    """Raised when an economic quantity is undefined (empty sector, bad base)."""

    def __init__(self, message, field=None):
        super().__init__(field, message)


@dataclass(frozen=True)
class EconParams:
    alpha: float = 0.6
    phi: float = 0.4
    eta: float = 0.4
    econ_b: float = 2.0
    A_m: float = 0.4
    A_a: float = 0.4
    Z_m: float = 10.0
    Z_a: float = 20.0
    rho: float = 1.0
    gamma: float = 0.5
    N_total: float = 100.0
    r_u: float = 0.10

    def __post_init__(self):
        check_econ_params(self)


# (field, lower, upper, lower_open, upper_open); None means unbounded.
_BOUNDS = {
    "alpha": (0.0, 1.0, True, True),
    "phi": (0.0, 1.0, True, True),
    "eta": (0.0, 1.0, True, True),
    "econ_b": (0.0, None, True, True),
    "A_m": (0.0, None, True, True),
    "A_a": (0.0, None, True, True),
    "Z_m": (0.0, None, True, True),
    "Z_a": (0.0, None, True, True),
    "rho": (0.0, None, True, True),
    "gamma": (0.0, None, True, True),
    "N_total": (2.0, None, False, True),
    "r_u": (0.0, 1.0, False, True),
}


def _interval(lo, hi, lo_open, hi_open):
    left = "(" if lo_open else "["
    right = ")" if hi_open or hi is None else "]"
    return f"{left}{lo:g}, {'inf' if hi is None else format(hi, 'g')}{right}"


def check_econ_params(params: EconParams) -> None:
    for name, (lo, hi, lo_open, hi_open) in _BOUNDS.items():
        value = getattr(params, name)
        if not isinstance(value, (int, float)) or isinstance(value, bool) or not math.isfinite(value):
            raise EconDomainError(f"{name} must be a finite number, got {value!r}", name)
        bad_lo = value <= lo if lo_open else value < lo
        bad_hi = hi is not None and (value >= hi if hi_open else value > hi)
        if bad_lo or bad_hi:
            raise EconDomainError(
                f"{name} must lie in {_interval(lo, hi, lo_open, hi_open)}, got {value!r}", name
            )
    if 1.0 - params.eta / params.econ_b <= 0.0:
        raise EconDomainError(
            f"1 - eta/econ_b must be positive, got eta={params.eta!r}, econ_b={params.econ_b!r}",
            "econ_b",
        )


@dataclass(frozen=True)
class EconDerived:
    """The four closed-form constants of the two production sectors."""

    xi1: float
    xi2: float
    xi3: float
    xi4: float


def _pow(base: float, exponent: float, what: str) -> float:
    if base <= 0.0:
        raise EconDomainError(f"{what}: base {base!r} must be positive")
    out = math.pow(base, exponent)
    if not math.isfinite(out):
        raise EconDomainError(f"{what}: {base!r}**{exponent!r} overflowed")
    return out


def derive_constants(params: EconParams) -> EconDerived:
    check_econ_params(params)
    alpha, eta, phi = params.alpha, params.eta, params.phi
    odds = eta / (1.0 - eta)
    keep = 1.0 - eta / params.econ_b

    xi1 = (
        params.A_m
        * _pow(params.Z_m, 1.0 - alpha, "Z_m")
        * _pow(_pow(odds, eta, "eta/(1-eta)") * keep, alpha, "xi1 bracket")
    )
    xi2 = (
        alpha
        * params.A_m
        * _pow(odds, alpha * eta, "eta/(1-eta)")
        * _pow(keep / params.Z_m, alpha - 1.0, "xi2 bracket")
    )
    xi3 = params.A_a * _pow(params.Z_a, 1.0 - phi, "Z_a")
    xi4 = params.A_a * phi / _pow(params.Z_a, phi - 1.0, "Z_a")
    return EconDerived(xi1, xi2, xi3, xi4)


def _check_interior(params: EconParams, n_u: float) -> None:
    if not n_u > 0.0:
        raise EconDomainError(f"urban population must be positive, got {n_u!r}")
    if not n_u < params.N_total:
        raise EconDomainError(
            f"rural population must be positive: n_u={n_u!r} >= N_total={params.N_total!r}"
        )


def manufacturing_wage(derived: EconDerived, params: EconParams, n_u: float) -> float:
    """Average manufacturing wage, decreasing in the urban head-count."""
    if not n_u > 0.0:
        raise EconDomainError(f"manufacturing wage undefined for n_u={n_u!r}")
    return derived.xi2 * math.pow(n_u, params.alpha - 1.0)


def production(derived: EconDerived, params: EconParams, n_u: float) -> tuple[float, float]:
    """Aggregate (manufacturing, agricultural) output."""
    _check_interior(params, n_u)
    y_m = derived.xi1 * math.pow(n_u, params.alpha)
    y_a = derived.xi3 * math.pow(params.N_total - n_u, params.phi)
    return y_m, y_a


def relative_price(derived: EconDerived, params: EconParams, n_u: float) -> float:
    y_m, y_a = production(derived, params, n_u)
    if y_m <= 0.0 or y_a <= 0.0:
        raise EconDomainError("relative price undefined: a sector produces nothing")
    return params.rho * math.pow(y_m / y_a, params.gamma)


def agricultural_income(
    derived: EconDerived, params: EconParams, price: float, n_u: float
) -> float:
    if not n_u < params.N_total:
        raise EconDomainError(
            f"agricultural income undefined: n_u={n_u!r} leaves no rural workers"
        )
    if not n_u > 0.0:
        raise EconDomainError(f"urban population must be positive, got {n_u!r}")
    return derived.xi4 * price * math.pow(params.N_total - n_u, params.phi - 1.0)


def expected_wage_differential(derived: EconDerived, params: EconParams, n_u: float) -> float:
    """Urban expected wage (net of unemployment risk) minus rural income.

    Positive values pull workers into the cities.
    """
    _check_interior(params, n_u)
    w_m = manufacturing_wage(derived, params, n_u)
    w_a = agricultural_income(derived, params, relative_price(derived, params, n_u), n_u)
    return (1.0 - params.r_u) * w_m - w_a
