"""Hastings-McLeod Painleve II solution and Tracy-Widom reference tails.

The second Painleve equation q'' = 2 q^3 + x q has a distinguished solution
decaying like Ai(x) on the right; it is a separatrix, so the integration
anchors on the right (where the asymptotic series is accurate) and proceeds
leftward, the numerically stable direction.  The stepper expands the
solution in adaptive Taylor segments: the polynomial right-hand side gives a
simple recursion for the series coefficients, and the accumulated integrals

    I1(x) = int_x^inf q(t) dt,
    K(x)  = int_x^inf q(t)^2 dt,
    I2(x) = int_x^inf (t - x) q(t)^2 dt

ride along as extra series (I2' = -K, K' = -q^2, I1' = -q).  Segments act as
dense output: any point in the covered range evaluates to full working
precision, which the Tracy-Widom tails

    upper_2(s) = 1 - exp(-I2(s)),
    upper_1(s) = 1 - exp(-(I1(s) + I2(s)) / 2)

inherit.  (The exponential tail formulas are the standard determinantal
representations from the Tracy-Widom literature, not something derived
here.)

The anchor at x0 = 10 corrects Ai by the first term q_1 of the exponential
expansion q = q_0 + q_1 + ..., where q_0 = Ai and each q_m solves a forced
Airy equation, q_m(x) = 2 pi * int_x^inf W(x,s) f_m(s) ds with W the Airy
Wronskian kernel and f_m the sum of triple products q_i q_j q_l over
i+j+l = m-1.  With that correction the anchor truncation error is of the
order of q_2(10) ~ 1e-53.  At checkpoints x = 8, 6, 4 the trajectory is
re-matched against the series: the drift is recorded and must stay inside a
q_2-sized envelope; only if it escapes (which indicates precision loss) is
the state re-anchored to the series.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

from mpmath import mp

from . import limits
from .errors import (
    BlowupError,
    DomainError,
    ParamError,
    PrecisionError,
    RangeError,
)
from .specfun import HIGH_CTX, PrecisionContext, quad

_X0 = 10.0
_S_MIN_LIMIT = -8.0
_CHECKPOINTS = (8.0, 6.0, 4.0)


def _decay_cut(digits, lo):
    """Truncation point for integrands decaying like exp(-(4/3) s^(3/2)).

    Chosen so the dropped tail is below 10**-(digits+12); keeps quadrature
    nodes away from the huge arguments where the Airy primitives are costly.
    """
    cut = (0.75 * (digits + 12) * 2.302585092994046) ** (2.0 / 3.0)
    return mp.mpf(max(float(lo) + 10.0, cut))


@dataclass(frozen=True)
class PainleveSolution:
    """Gridded Hastings-McLeod solution with accumulated tail integrals.

    ``grid`` decreases from ``x0`` to the requested left end; ``q``,
    ``qprime``, ``I1``, ``I2`` (and the inner integral ``K``) hold values at
    the grid nodes.  ``segments`` carry the Taylor coefficients of each step
    for dense evaluation.  ``drift_checks`` records (x, drift, envelope) from
    the series re-matching at the checkpoints.
    """

    grid: tuple
    q: tuple
    qprime: tuple
    I1: tuple
    I2: tuple
    K: tuple
    x0: float
    ctx: PrecisionContext
    segments: tuple
    cert_tol: float
    drift_checks: tuple


def wronskian_kernel(x, s, ctx: PrecisionContext = HIGH_CTX):
    """Airy cross kernel Ai(x) Bi(s) - Bi(x) Ai(s); antisymmetric in (x, s)."""
    with ctx.workdps():
        xm, sm = mp.mpf(x), mp.mpf(s)
        return mp.airyai(xm) * mp.airybi(sm) - mp.airybi(xm) * mp.airyai(sm)


def qm_asymptote(m: int, x):
    """Leading asymptotic form of the m-th exponential-expansion term."""
    xm = mp.mpf(x)
    return mp.e ** (-mp.mpf(4 * m + 2) / 3 * xm ** mp.mpf(1.5)) / (
        mp.power(2, 4 * m + 1)
        * mp.pi ** (mp.mpf(2 * m + 1) / 2)
        * xm ** (mp.mpf(6 * m + 1) / 4)
    )


# compositions i+j+l = m-1 (sorted) with multiplicities
_COMPOSITIONS = {
    1: (((0, 0, 0), 1),),
    2: (((0, 0, 1), 3),),
    3: (((0, 0, 2), 3), ((0, 1, 1), 3)),
}


@lru_cache(maxsize=4096)
def _qm_cached(m: int, xraw, digits: int):
    x = mp.mpf(xraw)
    with mp.workdps(digits + 10):
        if m == 0:
            return mp.airyai(x)
        ai_x, bi_x = mp.airyai(x), mp.airybi(x)

        def f_m(s):
            total = mp.mpf(0)
            for comp, count in _COMPOSITIONS[m]:
                prod = mp.mpf(count)
                for idx in comp:
                    prod *= _qm_cached(idx, s._mpf_, digits)
                total += prod
            return total

        def integrand(s):
            w = ai_x * mp.airybi(s) - bi_x * mp.airyai(s)
            return w * f_m(s)

        qctx = PrecisionContext(digits=max(15, digits))
        cut = _decay_cut(digits, x)
        val, _ = quad(integrand, x, cut, qctx, points=[x + 2, x + 6])
        return 2 * mp.pi * val


def q_expansion_term(m: int, x, ctx: PrecisionContext = HIGH_CTX):
    """Term q_m of the exponential expansion at ``x`` (m <= 3, x >= 1).

    q_0 is Ai; higher terms integrate the Wronskian kernel against triple
    products of lower terms, so the cost grows combinatorially with m.
    Results are memoized per (m, x, digits).
    """
    if not 0 <= m <= 3:
        raise ParamError("expansion terms are implemented for 0 <= m <= 3")
    if float(x) < 1:
        raise DomainError("expansion terms target the asymptotic regime x >= 1")
    with ctx.workdps():
        xm = mp.mpf(x)
    return _qm_cached(m, xm._mpf_, ctx.digits)


def _q1_with_deriv(x0, digits, qdigits=None):
    """q_1 and its x-derivative at ``x0``, by quadrature.

    ``qdigits`` sets the quadrature precision; since q_1 is exponentially
    small, modest relative precision already gives it to a tiny absolute
    error, so callers pass a reduced value.  Airy evaluations are shared
    between the two integrals via a per-call node cache.
    """
    qdigits = qdigits or digits
    with mp.workdps(qdigits + 10):
        ai_x, aip_x = mp.airyai(x0), mp.airyai(x0, 1)
        bi_x, bip_x = mp.airybi(x0), mp.airybi(x0, 1)
        qctx = PrecisionContext(digits=qdigits)
        cache = {}

        def node(s):
            key = s._mpf_
            v = cache.get(key)
            if v is None:
                ai = mp.airyai(s)
                v = (ai**3, mp.airybi(s), ai)
                cache[key] = v
            return v

        def f_val(s):
            cube, bi, ai = node(s)
            return (ai_x * bi - bi_x * ai) * cube

        def f_der(s):
            cube, bi, ai = node(s)
            return (aip_x * bi - bip_x * ai) * cube

        cut = _decay_cut(qdigits, x0)
        pts = [x0 + 2, x0 + 6]
        v, _ = quad(f_val, x0, cut, qctx, points=pts)
        vp, _ = quad(f_der, x0, cut, qctx, points=pts)
        return 2 * mp.pi * v, 2 * mp.pi * vp


# closed antiderivatives of Airy products (verified against quadrature in the
# test suite); all follow from Ai'' = x Ai, Bi'' = x Bi
def _ea(x):
    """int_x^inf Ai(t)^2 dt."""
    ai, aip = mp.airyai(x), mp.airyai(x, 1)
    return aip * aip - x * ai * ai


def _ga(x):
    """int_x^inf t Ai(t)^2 dt."""
    ai, aip = mp.airyai(x), mp.airyai(x, 1)
    f2 = (2 * x * x * ai * ai - 2 * x * aip * aip) / 3 - ai * aip / 3
    return (-ai * aip - f2) / 2


def _pb(t):
    """Antiderivative of Ai(t) Bi(t)."""
    return t * mp.airyai(t) * mp.airybi(t) - mp.airyai(t, 1) * mp.airybi(t, 1)


def _rb(t):
    """Antiderivative of t Ai(t) Bi(t)."""
    ai, aip = mp.airyai(t), mp.airyai(t, 1)
    bi, bip = mp.airybi(t), mp.airybi(t, 1)
    return (t * t * ai * bi - t * aip * bip + (ai * bip + aip * bi) / 2) / 3


def _anchor_corrections(x0, qdigits):
    """Integrals of q_1 and its Ai cross terms over (x0, inf).

    Swapping the order of integration in int q_1 reduces everything to a
    single quadrature against Ai(s)^3 with closed inner antiderivatives.
    The three integrands share all Airy evaluations through one node cache.
    Returns (int q1, int Ai*q1, int (t-x0)*Ai*q1).
    """
    with mp.workdps(qdigits + 10):
        qctx = PrecisionContext(digits=qdigits)
        ia0 = mp.airyai(x0, -1)
        ib0 = mp.airybi(x0, -1)
        ea0, ga0, pb0, rb0 = _ea(x0), _ga(x0), _pb(x0), _rb(x0)
        cache = {}

        def node(s):
            key = s._mpf_
            v = cache.get(key)
            if v is None:
                ai, bi = mp.airyai(s), mp.airybi(s)
                ja = ea0 - _ea(s)
                jb = _pb(s) - pb0
                v = (ai**3, ai, bi, ja, jb)
                cache[key] = v
            return v

        def f_q1(s):
            cube, ai, bi, _, _ = node(s)
            return cube * (
                bi * (mp.airyai(s, -1) - ia0) - ai * (mp.airybi(s, -1) - ib0)
            )

        def f_ai_q1(s):
            cube, ai, bi, ja, jb = node(s)
            return cube * (bi * ja - ai * jb)

        def f_tai_q1(s):
            cube, ai, bi, ja, jb = node(s)
            qa2 = ga0 - _ga(s)
            qb2 = _rb(s) - rb0
            return cube * (bi * (qa2 - x0 * ja) - ai * (qb2 - x0 * jb))

        pts = [x0 + 2, x0 + 6]
        cut = _decay_cut(qdigits, x0)
        v1, _ = quad(f_q1, x0, cut, qctx, points=pts)
        v2, _ = quad(f_ai_q1, x0, cut, qctx, points=pts)
        v3, _ = quad(f_tai_q1, x0, cut, qctx, points=pts)
        return 2 * mp.pi * v1, 2 * mp.pi * v2, 2 * mp.pi * v3


def _taylor_coeffs(q0, q1, xc, N):
    """Taylor coefficients of q around xc from q'' = 2 q^3 + x q.

    Returns (a, sq) where a[0..N] are the q coefficients and sq[0..N-1] the
    coefficients of q^2 (needed by the integral series).
    """
    a = [mp.mpf(0)] * (N + 1)
    a[0], a[1] = q0, q1
    sq = [mp.mpf(0)] * N
    cube_cache = [mp.mpf(0)] * N
    for k in range(N - 1):
        sq[k] = mp.fsum(a[i] * a[k - i] for i in range(k + 1))
        cube_cache[k] = mp.fsum(a[i] * sq[k - i] for i in range(k + 1))
        rhs = 2 * cube_cache[k] + xc * a[k]
        if k >= 1:
            rhs += a[k - 1]
        a[k + 2] = rhs / ((k + 1) * (k + 2))
    if N >= 1:
        sq[N - 1] = mp.fsum(a[i] * a[N - 1 - i] for i in range(N))
    return a, sq


def _integral_series(a, sq, i1, kk, i2, N):
    b1 = [mp.mpf(0)] * (N + 1)
    bk = [mp.mpf(0)] * (N + 1)
    b2 = [mp.mpf(0)] * (N + 1)
    b1[0], bk[0], b2[0] = i1, kk, i2
    for k in range(N):
        b1[k + 1] = -a[k] / (k + 1)
        bk[k + 1] = -sq[k] / (k + 1)
    for k in range(N):
        b2[k + 1] = -bk[k] / (k + 1)
    return b1, bk, b2


def _horner(coeffs, d):
    acc = mp.mpf(0)
    for c in reversed(coeffs):
        acc = acc * d + c
    return acc


def solve_hastings_mcleod(s_min, ctx: PrecisionContext = None) -> PainleveSolution:
    """Integrate the Hastings-McLeod solution from x0 = 10 down to ``s_min``.

    ``s_min`` must lie in the documented validity window [-8, x0).  Raises
    BlowupError if the trajectory leaves |q| <= 1e6 (a symptom of falling off
    the separatrix; raise the precision).
    """
    ctx = ctx or HIGH_CTX
    s_min_f = float(s_min)
    if s_min_f < _S_MIN_LIMIT:
        raise DomainError(f"validity window is s_min >= {_S_MIN_LIMIT}")
    if s_min_f >= _X0:
        raise DomainError("s_min must be below the anchor x0 = 10")
    digits = ctx.digits
    wp = digits + 15
    N = digits + 18
    with mp.workdps(wp):
        x0 = mp.mpf(_X0)
        target_end = mp.mpf(s_min)
        # corrections are O(1e-31), so digits-20 relative precision already
        # places them below the 10**-(digits+8) anchor budget
        qdig = max(22, digits - 20)
        q1v, q1pv = _q1_with_deriv(x0, wp, qdigits=qdig)
        q = mp.airyai(x0) + q1v
        qp = mp.airyai(x0, 1) + q1pv
        int_q1, int_ai_q1, int_tai_q1 = _anchor_corrections(x0, qdig)
        i1 = (mp.mpf(1) / 3 - mp.airyai(x0, -1)) + int_q1
        kk = _ea(x0) + 2 * int_ai_q1
        i2 = limits.f_hat_2_closed(x0, PrecisionContext(digits=wp)) + 2 * int_tai_q1

        step_tol = mp.mpf(10) ** (-(digits + 8))
        targets = sorted(
            {mp.mpf(c) for c in _CHECKPOINTS if s_min_f < c < _X0} | {target_end},
            reverse=True,
        )
        check_set = {mp.mpf(c) for c in _CHECKPOINTS}

        grid = [x0]
        qs, qps, i1s, kks, i2s = [q], [qp], [i1], [kk], [i2]
        segments = []
        drift_checks = []
        x = x0
        while x > target_end:
            a, sq = _taylor_coeffs(q, qp, x, N)
            b1, bk, b2 = _integral_series(a, sq, i1, kk, i2, N)
            step = mp.mpf("0.4")
            while step >= mp.mpf("1e-3"):
                tail = mp.fsum(abs(a[k]) * step**k for k in (N - 2, N - 1, N))
                if tail <= step_tol:
                    break
                step = step * mp.mpf("0.7")
            if step < mp.mpf("1e-3"):
                raise BlowupError("step size collapsed; solution leaving trust region")
            h = -step
            nxt_target = max(t for t in targets if t < x)
            x_new = x + h
            if x_new < nxt_target:
                h = nxt_target - x
                x_new = nxt_target
            ad = [(k + 1) * a[k + 1] for k in range(N)]
            q = _horner(a, h)
            qp = _horner(ad, h)
            i1, kk, i2 = _horner(b1, h), _horner(bk, h), _horner(b2, h)
            segments.append((x, h, tuple(a), tuple(b1), tuple(bk), tuple(b2)))
            if abs(q) > 1e6:
                raise BlowupError(f"|q| exceeded 1e6 at x = {float(x_new):.3f}")
            x = x_new
            if x in check_set:
                q1x, q1px = _q1_with_deriv(x, wp, qdigits=22)
                series_q = mp.airyai(x) + q1x
                series_qp = mp.airyai(x, 1) + q1px
                drift = abs(q - series_q)
                # floor covers accumulated truncation amplified along the
                # unstable (Airy-ratio) direction, ~1e7 from 10 down to 4
                envelope = 30 * qm_asymptote(2, x) + mp.mpf(10) ** (-digits)
                drift_checks.append((float(x), drift, envelope))
                if drift > envelope:
                    q, qp = series_q, series_qp
            grid.append(x)
            qs.append(q)
            qps.append(qp)
            i1s.append(i1)
            kks.append(kk)
            i2s.append(i2)

        return PainleveSolution(
            grid=tuple(grid),
            q=tuple(qs),
            qprime=tuple(qps),
            I1=tuple(i1s),
            I2=tuple(i2s),
            K=tuple(kks),
            x0=_X0,
            ctx=ctx,
            segments=tuple(segments),
            cert_tol=float(mp.mpf(10) ** (-(digits - 4))),
            drift_checks=tuple(drift_checks),
        )


def _eval_state(sol: PainleveSolution, x):
    """(q, q', I1, K, I2) at x by dense Taylor evaluation on the segments."""
    xm = mp.mpf(x)
    lo, hi = sol.grid[-1], sol.grid[0]
    if not (lo <= xm <= hi):
        raise RangeError(
            f"x = {float(xm)} outside the solved range [{float(lo)}, {float(hi)}]"
        )
    segs = sol.segments
    lo_i, hi_i = 0, len(segs) - 1
    while lo_i < hi_i:
        mid = (lo_i + hi_i) // 2
        center, h = segs[mid][0], segs[mid][1]
        if xm > center:
            hi_i = mid - 1
        elif xm < center + h:
            lo_i = mid + 1
        else:
            lo_i = hi_i = mid
    center, h, a, b1, bk, b2 = segs[lo_i]
    d = xm - center
    ad = [(k + 1) * a[k + 1] for k in range(len(a) - 1)]
    return (
        _horner(a, d),
        _horner(ad, d),
        _horner(b1, d),
        _horner(bk, d),
        _horner(b2, d),
    )


def q_value(sol: PainleveSolution, x):
    """q(x) from the solved segments."""
    return _eval_state(sol, x)[0]


def tw_upper(symmetry_class: int, s, sol: PainleveSolution):
    """Tracy-Widom upper tail probability at ``s`` for class 1 or 2."""
    if symmetry_class not in (1, 2):
        raise ParamError("symmetry_class must be 1 or 2")
    with sol.ctx.workdps():
        _, _, i1, _, i2 = _eval_state(sol, s)
        if symmetry_class == 2:
            tail = -mp.expm1(-i2)
        else:
            tail = -mp.expm1(-(i1 + i2) / 2)
        return min(max(tail, mp.mpf(0)), mp.mpf(1))


def verify_q_identity(sol: PainleveSolution, x, ctx: PrecisionContext = None):
    """Residual of q(x) = 2 pi int_x^inf W(x,s) q(s)^3 ds + Ai(x).

    The integrand uses the solved q below the anchor and Ai + q_1 (asymptote
    form) beyond it; the residual magnitude certifies the solver.
    """
    ctx = ctx or sol.ctx
    with ctx.workdps():
        xm = mp.mpf(x)
        x0 = mp.mpf(sol.x0)
        if not (sol.grid[-1] <= xm <= x0):
            raise RangeError("x outside the solved range")
        ai_x, bi_x = mp.airyai(xm), mp.airybi(xm)

        def qfun(s):
            if s <= x0:
                return _eval_state(sol, s)[0]
            return mp.airyai(s) + qm_asymptote(1, s)

        def integrand(s):
            w = ai_x * mp.airybi(s) - bi_x * mp.airyai(s)
            return w * qfun(s) ** 3

        cut = _decay_cut(ctx.digits, x0)
        pts = [p for p in (xm + 1, mp.mpf(2), mp.mpf(6), x0, x0 + 4) if xm < p]
        val, _ = quad(integrand, xm, cut, ctx, points=pts)
        return _eval_state(sol, xm)[0] - 2 * mp.pi * val - ai_x


def measured_delta(
    symmetry_class: int, s, sol: PainleveSolution, ctx: PrecisionContext = None
):
    """Relative deviation of the limit curve from the Tracy-Widom tail.

    Both terms agree to many digits, so the computation always runs at 30+
    digits; if the difference falls below the certified error of either term
    a PrecisionError is raised instead of returning noise.
    """
    base = ctx or sol.ctx
    digits = max(30, base.digits)
    wctx = PrecisionContext(digits=digits)
    with wctx.workdps():
        if symmetry_class == 1:
            f = limits.f_hat_1(s, wctx)
        else:
            f = limits.f_hat_2(s, wctx)
        t = tw_upper(symmetry_class, s, sol)
        if t <= 0:
            raise PrecisionError("Tracy-Widom tail underflows at this s")
        budget = mp.mpf(sol.cert_tol) + abs(f) * mp.mpf(10) ** (-(digits - 2))
        if abs(f - t) < budget:
            raise PrecisionError(
                "limit curve and Tracy-Widom tail agree within the certified "
                "error; raise the precision to resolve the difference"
            )
        return (f - t) / t


@lru_cache(maxsize=4)
def default_solution(digits: int = 50, s_min: float = -8.0) -> PainleveSolution:
    """Shared Hastings-McLeod solution, cached per precision."""
    return solve_hastings_mcleod(s_min, PrecisionContext(digits=digits))
