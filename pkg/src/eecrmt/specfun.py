"""Special functions and quadrature at configurable decimal precision.

All numerical kernels in this package funnel through this module: the gamma
family, regularized incomplete gamma/beta, Airy functions, and adaptive
(tanh-sinh) quadrature on finite and semi-infinite intervals.  Evaluation is
delegated to mpmath, which gives correctly rounded results at any requested
number of digits; this module pins the precision policy, the domain checks
and the error contract on top of it.

Results are returned as ``mpmath.mpf`` values carrying the working precision
of the call.  A :class:`PrecisionContext` travels through every operation;
its ``digits`` field sets the working precision, and ``abs_tol``/``rel_tol``
are the error bounds the caller is entitled to rely on.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple

from mpmath import mp

from .errors import ConvergenceError, DomainError, PoleError

# Guard digits used internally so that returned values are good to the full
# requested precision.
_GUARD = 10


@dataclass(frozen=True)
class PrecisionContext:
    """Working precision and error tolerances for numerical operations.

    Parameters
    ----------
    digits : int
        Decimal digits of working precision, at least 15.
    abs_tol, rel_tol : float, optional
        Error bounds in (0, 1).  Default is ``10**-(digits - 3)``.
    """

    digits: int = 15
    abs_tol: float = None
    rel_tol: float = None

    def __post_init__(self):
        if self.digits < 15:
            raise DomainError("PrecisionContext requires digits >= 15")
        default = 10.0 ** (-(self.digits - 3))
        if self.abs_tol is None:
            object.__setattr__(self, "abs_tol", default)
        if self.rel_tol is None:
            object.__setattr__(self, "rel_tol", default)
        for name in ("abs_tol", "rel_tol"):
            t = getattr(self, name)
            if not (0.0 < t < 1.0):
                raise DomainError(f"{name} must lie in (0, 1), got {t}")

    def workdps(self, extra: int = _GUARD):
        """mpmath context manager running at ``digits + extra`` decimals."""
        return mp.workdps(self.digits + extra)

    def tolerance(self, value) -> float:
        """Error budget for a result of magnitude ``value``."""
        return max(self.abs_tol, self.rel_tol * abs(float(value)))


DEFAULT_CTX = PrecisionContext(digits=15)
HIGH_CTX = PrecisionContext(digits=50)


class AiryValues(NamedTuple):
    ai: mp.mpf
    aip: mp.mpf
    bi: mp.mpf
    bip: mp.mpf


def gamma_fn(x, ctx: PrecisionContext = DEFAULT_CTX):
    """Gamma function.

    Raises :class:`PoleError` at non-positive integers.
    """
    with ctx.workdps():
        xm = mp.mpf(x)
        if xm <= 0 and xm == mp.floor(xm):
            raise PoleError(f"gamma pole at x={x}")
        return mp.gamma(xm)


def upper_gamma_reg(a, x, ctx: PrecisionContext = DEFAULT_CTX):
    """Regularized upper incomplete gamma Q(a, x) = Gamma(a, x)/Gamma(a).

    Requires a > 0 and x >= 0; the result lies in [0, 1] and is
    non-increasing in x.
    """
    with ctx.workdps():
        am, xm = mp.mpf(a), mp.mpf(x)
        if am <= 0:
            raise DomainError(f"upper_gamma_reg requires a > 0, got a={a}")
        if xm < 0:
            raise DomainError(f"upper_gamma_reg requires x >= 0, got x={x}")
        return mp.gammainc(am, xm, mp.inf, regularized=True)


def lower_gamma_reg(a, x, ctx: PrecisionContext = DEFAULT_CTX):
    """Regularized lower incomplete gamma P(a, x) = 1 - Q(a, x)."""
    with ctx.workdps():
        am, xm = mp.mpf(a), mp.mpf(x)
        if am <= 0:
            raise DomainError(f"lower_gamma_reg requires a > 0, got a={a}")
        if xm < 0:
            raise DomainError(f"lower_gamma_reg requires x >= 0, got x={x}")
        return mp.gammainc(am, 0, xm, regularized=True)


def reg_incomplete_beta(a, b, x, ctx: PrecisionContext = DEFAULT_CTX):
    """Regularized incomplete beta I_x(a, b), non-decreasing in x on [0, 1]."""
    with ctx.workdps():
        am, bm, xm = mp.mpf(a), mp.mpf(b), mp.mpf(x)
        if am <= 0 or bm <= 0:
            raise DomainError(f"reg_incomplete_beta requires a, b > 0, got ({a}, {b})")
        if not (0 <= xm <= 1):
            raise DomainError(f"reg_incomplete_beta requires 0 <= x <= 1, got x={x}")
        return mp.betainc(am, bm, 0, xm, regularized=True)


def airy(x, ctx: PrecisionContext = DEFAULT_CTX) -> AiryValues:
    """Airy functions of the first and second kinds with derivatives.

    Returns ``(Ai, Ai', Bi, Bi')`` at ``x``.  mpmath evaluates these by
    series/asymptotics internally and its floats carry an essentially
    unbounded exponent, so Bi does not overflow for any representable x.
    """
    with ctx.workdps():
        xm = mp.mpf(x)
        return AiryValues(
            mp.airyai(xm), mp.airyai(xm, 1), mp.airybi(xm), mp.airybi(xm, 1)
        )


def airyai_integral(x, ctx: PrecisionContext = DEFAULT_CTX):
    """Primitive of Ai: the integral of Ai(t) for t from 0 to x."""
    with ctx.workdps():
        return mp.airyai(mp.mpf(x), -1)


def airybi_integral(x, ctx: PrecisionContext = DEFAULT_CTX):
    """Primitive of Bi: the integral of Bi(t) for t from 0 to x."""
    with ctx.workdps():
        return mp.airybi(mp.mpf(x), -1)


def quad(
    f: Callable,
    a,
    b,
    ctx: PrecisionContext = DEFAULT_CTX,
    points=None,
):
    """Adaptive tanh-sinh quadrature of ``f`` over (a, b).

    Either endpoint may be infinite; semi-infinite intervals are handled by
    the double-exponential variable transformation built into the rule.
    ``points`` optionally lists interior split points (useful for integrands
    with mild kinks or oscillation).

    Returns
    -------
    (value, err_est) : pair of mpf
        ``err_est <= max(ctx.abs_tol, ctx.rel_tol * |value|)`` on success.

    Raises
    ------
    ConvergenceError
        If the tolerance cannot be certified within the subdivision budget.
        The partial value and its error estimate ride along on the exception.
    """
    with ctx.workdps():
        lo = mp.inf * mp.sign(a) if mp.isinf(mp.mpf(a)) else mp.mpf(a)
        hi = mp.inf * mp.sign(b) if mp.isinf(mp.mpf(b)) else mp.mpf(b)
        path = [lo]
        if points:
            path.extend(mp.mpf(p) for p in points if lo < mp.mpf(p) < hi)
        path.append(hi)
        maxdegree = max(8, 5 + ctx.digits // 6)
        value, err = mp.quad(f, path, error=True, maxdegree=maxdegree)
    tol = ctx.tolerance(value)
    if not (err <= tol) or mp.isnan(value):
        raise ConvergenceError(
            f"quadrature error estimate {mp.nstr(err, 5)} exceeds tolerance {tol}",
            value=value,
            err_est=err,
        )
    return value, err
