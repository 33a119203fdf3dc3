"""Special-function and quadrature kernel shared by all analytical formulas.

Everything here is pure and reentrant.  The incomplete gamma functions are
unnormalized (they satisfy ``lower + upper = gamma_fn``), which is the form
the closed-form intensity measures are written in.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import scipy.integrate
import scipy.special


class NumericsError(ValueError):
    """Domain violation in a special-function argument."""


class IntegrationError(RuntimeError):
    """Adaptive quadrature failed to reach the requested tolerance.

    Carries the best estimate and the achieved error bound instead of
    silently returning a value of unknown quality.
    """

    def __init__(self, message: str, estimate: float, error_estimate: float):
        super().__init__(f"{message} (estimate={estimate!r}, error={error_estimate!r})")
        self.estimate = estimate
        self.error_estimate = error_estimate


class UnsupportedOrderError(NumericsError):
    """Requested derivative order exceeds the supported fading shapes."""


# Highest Laplace-derivative order needed by the supported Nakagami shapes
# (shape 3 LOS / shape 2 NLOS -> orders 0..2).  Larger orders are rejected
# rather than approximated.
MAX_DERIVATIVE_ORDER = 2


@dataclass(frozen=True)
class QuadratureSettings:
    """Tolerances and limits for adaptive quadrature.

    ``tail_rule`` names the policy for semi-infinite ranges; the only
    supported rule maps the tail onto (0, 1] with the rational substitution
    x = lo + u/(1-u) before subdividing adaptively.
    """

    rel_tol: float = 1e-8
    abs_tol: float = 1e-12
    max_subdivisions: int = 200
    tail_rule: str = "rational-substitution"

    def __post_init__(self) -> None:
        if not self.rel_tol > 0:
            raise NumericsError(f"rel_tol must be positive, got {self.rel_tol}")
        if not self.abs_tol > 0:
            raise NumericsError(f"abs_tol must be positive, got {self.abs_tol}")
        if self.max_subdivisions < 16:
            raise NumericsError(
                f"max_subdivisions must be at least 16, got {self.max_subdivisions}"
            )
        if self.tail_rule != "rational-substitution":
            raise NumericsError(f"unknown tail rule {self.tail_rule!r}")


DEFAULT_SETTINGS = QuadratureSettings()


def gamma_fn(x: float) -> float:
    """Gamma function for positive real arguments."""
    if not x > 0:
        raise NumericsError(f"gamma_fn requires x > 0, got {x}")
    return float(scipy.special.gamma(x))


def lower_incomplete_gamma(s: float, x: float) -> float:
    """Unnormalized lower incomplete gamma: integral of t^(s-1) e^-t over [0, x]."""
    if not s > 0:
        raise NumericsError(f"lower_incomplete_gamma requires s > 0, got {s}")
    if x < 0:
        raise NumericsError(f"lower_incomplete_gamma requires x >= 0, got {x}")
    return float(scipy.special.gammainc(s, x)) * gamma_fn(s)


def upper_incomplete_gamma(s: float, x: float) -> float:
    """Unnormalized upper incomplete gamma, the complement of the lower one."""
    if not s > 0:
        raise NumericsError(f"upper_incomplete_gamma requires s > 0, got {s}")
    if x < 0:
        raise NumericsError(f"upper_incomplete_gamma requires x >= 0, got {x}")
    return float(scipy.special.gammaincc(s, x)) * gamma_fn(s)


def _hyp2f1_near_unit(a: float, b: float, c: float, w: float) -> float:
    """2F1(a, b; c; 1 - w) for 0 < w <= 1e-10 via the connection formula,
    which stays conditioned where the direct evaluation overflows."""
    mu = c - a - b
    if abs(mu) < 1e-6:
        # logarithmic connection case (c = a + b); first two series terms
        psi = scipy.special.digamma
        g = scipy.special.gamma
        log_w = math.log(w)
        k0 = 2.0 * psi(1.0) - psi(a) - psi(b) - log_w
        k1 = a * b * (2.0 * psi(2.0) - psi(a + 1.0) - psi(b + 1.0) - log_w) * w
        return float(g(a + b) / (g(a) * g(b)) * (k0 + k1))
    if abs(mu - round(mu)) < 1e-9:
        raise NumericsError(
            f"gauss_2f1 near z=1 unsupported for integer c-a-b={mu}"
        )
    g = scipy.special.gamma
    first = g(c) * g(mu) / (g(c - a) * g(c - b)) * (1.0 + a * b / (1.0 - mu) * w)
    second = (
        w**mu
        * g(c)
        * g(-mu)
        / (g(a) * g(b))
        * (1.0 + (c - a) * (c - b) / (mu + 1.0) * w)
    )
    return float(first + second)


def gauss_2f1(a: float, b: float, c: float, z: float) -> float:
    """Gauss hypergeometric function 2F1(a, b; c; z) for real z < 1.

    Arguments with z approaching 1 from below are supported: beyond the
    reach of the direct linear transformations the connection formula in
    1 - z takes over.  z >= 1 is rejected because none of the closed forms
    evaluated here ever leave [0, 1).
    """
    if c <= 0 and c == int(c):
        raise NumericsError(f"gauss_2f1 pole: c={c} is a non-positive integer")
    if not z < 1:
        raise NumericsError(f"gauss_2f1 requires z < 1, got {z}")
    w = 1.0 - z
    if 0.0 < w <= 1e-10:
        value = _hyp2f1_near_unit(a, b, c, w)
    else:
        value = float(scipy.special.hyp2f1(a, b, c, z))
    if not math.isfinite(value):
        raise NumericsError(f"gauss_2f1({a}, {b}; {c}; {z}) did not converge")
    return value


def integrate(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    settings: QuadratureSettings = DEFAULT_SETTINGS,
) -> float:
    """Adaptive quadrature of f over [lo, hi]; hi may be math.inf.

    Integrable endpoint singularities are handled by the adaptive
    subdivision.  If the requested tolerance cannot be certified within
    ``max_subdivisions`` an IntegrationError carrying the best estimate is
    raised.
    """
    result = scipy.integrate.quad(
        f,
        lo,
        hi,
        epsabs=settings.abs_tol,
        epsrel=settings.rel_tol,
        limit=settings.max_subdivisions,
        full_output=1,
    )
    value, abserr = float(result[0]), float(result[1])
    tolerance = max(settings.abs_tol, settings.rel_tol * abs(value))
    # abserr is a conservative bound: accept once the certified error is
    # within slack of the request or negligible relative to the value, and
    # reject genuine non-convergence (error at the percent scale of the
    # result, or worse).
    if abserr > 10.0 * tolerance and abserr > 1e-4 * abs(value):
        raise IntegrationError(
            f"quadrature over [{lo}, {hi}] did not converge", value, abserr
        )
    return value


def laplace_derivative(
    xi_derivatives: Callable[[int, float], float],
    order: int,
    s: float,
) -> float:
    """Signed derivative of order m of exp(xi(s)) at s.

    ``xi_derivatives(k, s)`` must return the k-th derivative of the exponent
    xi (k = 0 means xi itself).  The composition uses the complete Bell
    polynomial recurrence, which is exact for any order; orders above
    MAX_DERIVATIVE_ORDER are rejected because no supported fading shape
    needs them.
    """
    if order < 0:
        raise NumericsError(f"derivative order must be nonnegative, got {order}")
    if order > MAX_DERIVATIVE_ORDER:
        raise UnsupportedOrderError(
            f"derivative order {order} exceeds supported maximum {MAX_DERIVATIVE_ORDER}"
        )
    if not s > 0:
        raise NumericsError(f"laplace_derivative requires s > 0, got {s}")
    base = math.exp(xi_derivatives(0, s))
    if order == 0:
        return base
    # bell[n] is the complete Bell polynomial in xi', xi'', ..., xi^(n)
    derivs = [xi_derivatives(k, s) for k in range(1, order + 1)]
    bell = [1.0]
    for n in range(1, order + 1):
        total = 0.0
        for k in range(n):
            total += math.comb(n - 1, k) * bell[n - 1 - k] * derivs[k]
        bell.append(total)
    return bell[order] * base


def exponent_derivatives_from_intensity(
    intensity: Callable[[float], float],
    settings: QuadratureSettings = DEFAULT_SETTINGS,
) -> Callable[[int, float], float]:
    """Build the derivative evaluator of the shot-noise Laplace exponent.

    For an aggregate of inverse marks with one-dimensional intensity measure
    Lambda(0, t) = ``intensity(t)``, the Laplace exponent is

        xi(s) = -integral_0^inf Lambda(0, 1/z) s e^(-s z) dz,

    and differentiating under the integral gives, for m >= 1,

        xi^(m)(s) = -integral_0^inf Lambda(0, 1/z) (-z)^(m-1) (m - s z) e^(-s z) dz.

    Both are evaluated after the substitution u = s z, which pins the
    integrand scale to the e^(-u) weight regardless of s:

        xi^(m)(s) = (-1)^m s^(-m) integral_0^inf Lambda(0, s/u) u^(m-1) (m - u) e^(-u) du.
    """

    def _split(f: Callable[[float], float]) -> float:
        # the integrand has an algebraic singularity at u = 0; integrating
        # the unit interval separately keeps the extrapolating finite-range
        # rule on it instead of the semi-infinite transformation
        return integrate(f, 0.0, 1.0, settings) + integrate(f, 1.0, math.inf, settings)

    def derivs(order: int, s: float) -> float:
        if s == 0.0 and order == 0:
            return 0.0
        if not s > 0.0:
            raise NumericsError(f"exponent derivatives require s > 0, got {s}")
        if order == 0:
            return -_split(lambda u: intensity(s / u) * math.exp(-u))
        m = order

        def integrand(u: float) -> float:
            return intensity(s / u) * u ** (m - 1) * (m - u) * math.exp(-u)

        return (-1.0) ** m * s ** (-m) * _split(integrand)

    return derivs
