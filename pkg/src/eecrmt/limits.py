"""Large-size limits of the Euler-characteristic tail approximation.

Under edge scaling the approximation converges to Airy-type tail functions:
half the integrated Airy function for the real-symmetric class, and the
integral of Ai'(x)^2 - x Ai(x)^2 for the Hermitian class.  This module
evaluates those limit curves and the closed-form expressions for their
asymptotic relative error against the Tracy-Widom tails.
"""

from __future__ import annotations

from mpmath import mp

from .errors import DomainError
from .specfun import DEFAULT_CTX, PrecisionContext, quad

# Quadrature upper cutoff: beyond this the primitive-based closure takes over.
_TAIL_CUT = 12.0

# Below this threshold the antiderivative form of the Hermitian limit curve
# is used; above it the two terms agree to ~log10(3 s^3) digits and the
# defining integral is evaluated directly instead.  The working precision
# carries guard digits covering the cancellation on both branches.
_F2_CROSSOVER = 4.0


def _guarded(ctx: PrecisionContext, extra: int = 12) -> PrecisionContext:
    return PrecisionContext(digits=ctx.digits + extra, abs_tol=ctx.abs_tol,
                            rel_tol=ctx.rel_tol)


def f_hat_1(s, ctx: PrecisionContext = DEFAULT_CTX):
    """Real-symmetric limit curve: half the Airy mass above ``s``.

    Quadrature runs up to a fixed cutoff; the remaining tail is closed with
    the exact Airy primitive (total Airy mass is exactly 1/3 above zero).
    """
    wctx = _guarded(ctx, 8)
    with wctx.workdps():
        sm = mp.mpf(s)
        cut = mp.mpf(max(_TAIL_CUT, float(sm) + 1.0))
        tail = mp.mpf(1) / 3 - mp.airyai(cut, -1)
        if sm >= cut:
            return (mp.mpf(1) / 3 - mp.airyai(sm, -1)) / 2
        pts = [p for p in (-6, -4, -2, 0, 4, 8) if sm < p < cut]
        val, _ = quad(lambda t: mp.airyai(t), sm, cut, wctx, points=pts)
        return (val + tail) / 2


def f_hat_2_closed(s, ctx: PrecisionContext = DEFAULT_CTX):
    """Antiderivative form of the Hermitian limit curve.

    Differentiating (2/3) s^2 Ai^2 - (2/3) s Ai'^2 - (1/3) Ai Ai' and using
    Ai'' = s Ai recovers minus the integrand Ai'^2 - s Ai^2, and the form
    vanishes at +infinity, so it equals the integral from s upward.
    """
    with _guarded(ctx).workdps():
        sm = mp.mpf(s)
        ai, aip = mp.airyai(sm), mp.airyai(sm, 1)
        return (2 * sm * sm * ai * ai - 2 * sm * aip * aip) / 3 - ai * aip / 3


def f_hat_2(s, ctx: PrecisionContext = DEFAULT_CTX):
    """Hermitian limit curve: integral of Ai'(x)^2 - x Ai(x)^2 above ``s``."""
    if float(s) <= _F2_CROSSOVER:
        return f_hat_2_closed(s, ctx)
    wctx = _guarded(ctx)
    with wctx.workdps():
        sm = mp.mpf(s)

        def integrand(t):
            ai, aip = mp.airyai(t), mp.airyai(t, 1)
            return aip * aip - t * ai * ai

        val, _ = quad(integrand, sm, mp.inf, wctx, points=[sm + 3, sm + 10])
        return val


def delta_asymptote(symmetry_class: int, s, ctx: PrecisionContext = DEFAULT_CTX):
    """Asymptotic relative error of the limit curves against Tracy-Widom.

    Class 1 is negative (liberal), class 2 positive (conservative) and equals
    the square of the class-1 expression identically.
    """
    if float(s) <= 0:
        raise DomainError("delta asymptote requires s > 0")
    with ctx.workdps():
        sm = mp.mpf(s)
        if symmetry_class == 1:
            return -mp.power(sm, mp.mpf(-9) / 4) * mp.e ** (
                -mp.mpf(2) / 3 * sm ** mp.mpf(1.5)
            ) / (2**5 * mp.sqrt(mp.pi))
        if symmetry_class == 2:
            return mp.power(sm, mp.mpf(-9) / 2) * mp.e ** (
                -mp.mpf(4) / 3 * sm ** mp.mpf(1.5)
            ) / (2**10 * mp.pi)
    raise DomainError("symmetry_class must be 1 or 2")
