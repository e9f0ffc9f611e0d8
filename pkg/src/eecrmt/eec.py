"""Euler-characteristic tail approximations for the largest eigenvalue.

For a random matrix whose eigenvalue density carries a weight ``w`` and the
linkage factor ``prod (l_j - l_i)^beta``, the expected Euler characteristic
of the excursion set of the associated quadratic-form field approximates the
upper tail of the largest eigenvalue.  The approximation reduces to a single
weighted tail integral:

* real symmetric (beta = 1): the integrand is the expected eigenpolynomial
  of size n-1, divided by the side-condition constant gamma_{n-1};
* Hermitian (beta = 2): the integrand is the Wronskian-type combination
  phi_{n-1} phi_n' - phi_n phi_{n-1}' of the orthogonal polynomials,
  divided by the norm h_{n-1}.

For the six classical ensembles the integrals reduce termwise to regularized
incomplete gamma/beta functions; the conditional GOE and custom weights go
through the moment-based constructor and adaptive quadrature.  The raw
approximation is returned unclamped: it is meaningful in the upper tail and
may leave [0, 1] far to the left of the bulk.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple, Optional

from mpmath import mp

from . import poly, skewortho
from .errors import DegenerateError, ParamError
from .poly import (
    HermiteMonic,
    LaguerreMonic,
    ShiftedJacobiMonic,
    _pmul,
    _psub,
    _peval,
)
from .specfun import (
    DEFAULT_CTX,
    HIGH_CTX,
    PrecisionContext,
    gamma_fn,
    quad,
    reg_incomplete_beta,
    upper_gamma_reg,
)

REAL_KINDS = ("goe", "wishart", "beta", "condgoe", "custom_sym")
HERM_KINDS = ("gue", "cwishart", "cbeta", "custom_herm")
CLOSED_FORM_KINDS = ("goe", "wishart", "beta", "gue", "cwishart", "cbeta")

# Above this degree the expanded coefficients of the integrand polynomial
# cancel too violently; the tail integral switches to quadrature with
# recurrence-based evaluation.
_DEGREE_SWITCH = 20


@dataclass(frozen=True)
class EnsembleSpec:
    """Which random-matrix family, its size and parameters.

    ``alpha`` enters the Wishart and beta families, ``beta_param`` only the
    beta families.  Custom kinds carry a :class:`~eecrmt.skewortho.WeightSpec`.
    """

    kind: str
    n: int
    alpha: float = 0.0
    beta_param: float = 0.0
    weight: Optional[skewortho.WeightSpec] = None

    def __post_init__(self):
        if self.kind not in REAL_KINDS + HERM_KINDS:
            raise ParamError(f"unknown ensemble kind {self.kind!r}")
        if self.n < 1:
            raise ParamError("matrix size n must be >= 1")
        if self.kind in ("wishart", "cwishart") and not float(self.alpha) > -1:
            raise ParamError("Wishart families require alpha > -1")
        if self.kind in ("beta", "cbeta") and not (
            float(self.alpha) > -1 and float(self.beta_param) > -1
        ):
            raise ParamError("beta families require alpha, beta_param > -1")
        if self.kind in ("custom_sym", "custom_herm") and self.weight is None:
            raise ParamError("custom ensembles need a WeightSpec")

    @property
    def symmetry_class(self) -> int:
        return 1 if self.kind in REAL_KINDS else 2

    @property
    def is_hermitian(self) -> bool:
        return self.symmetry_class == 2


@dataclass(frozen=True)
class EdgeScaling:
    """Edge-asymptotic centering and scale (mu_n, sigma_n)."""

    mu_n: mp.mpf
    sigma_n: mp.mpf


@dataclass(frozen=True)
class EECResult:
    x: float
    value: mp.mpf
    method: str
    err_est: float
    s: Optional[float] = None


class RelativeError(NamedTuple):
    value: float
    stderr: float


def _family_for(e: EnsembleSpec):
    if e.kind in ("goe", "gue"):
        return HermiteMonic()
    if e.kind in ("wishart", "cwishart"):
        return LaguerreMonic(e.alpha)
    if e.kind in ("beta", "cbeta"):
        return ShiftedJacobiMonic(e.alpha, e.beta_param)
    return None


# ---------------------------------------------------------------------------
# termwise monomial tail integrals for the classical weights

def _gauss_tail_halved(k, x, half):
    """Integral of l^k exp(-l^2/half) over (x, inf) for x >= 0; half in {1, 2}."""
    a = mp.mpf(k + 1) / 2
    scale = mp.power(mp.mpf(half), a) / 2 * mp.gamma(a)
    return scale * mp.gammainc(a, x * x / half, mp.inf, regularized=True)


def _monomial_tail(kind, k, x, alpha, beta):
    """Integral of l^k times the ensemble weight over (x, upper support end)."""
    if kind in ("goe", "gue"):
        half = 2 if kind == "goe" else 1
        if x >= 0:
            return _gauss_tail_halved(k, x, half)
        full = 2 * _gauss_tail_halved(k, mp.mpf(0), half)
        if k % 2 == 0:
            return full - _gauss_tail_halved(k, -x, half)
        return _gauss_tail_halved(k, -x, half)
    if kind in ("wishart", "cwishart"):
        xm = max(x, mp.mpf(0))
        if kind == "wishart":
            a = k + (mp.mpf(alpha) + 1) / 2
            return mp.power(2, a) * mp.gamma(a) * mp.gammainc(a, xm / 2, mp.inf, regularized=True)
        a = k + mp.mpf(alpha) + 1
        return mp.gamma(a) * mp.gammainc(a, xm, mp.inf, regularized=True)
    # beta families on (0, 1)
    if x >= 1:
        return mp.mpf(0)
    xm = max(x, mp.mpf(0))
    if kind == "beta":
        a = k + (mp.mpf(alpha) + 1) / 2
        b = (mp.mpf(beta) + 1) / 2
    else:
        a = k + mp.mpf(alpha) + 1
        b = mp.mpf(beta) + 1
    return mp.beta(a, b) * (1 - mp.betainc(a, b, 0, xm, regularized=True))


def _tail_integral_termwise(kind, coeffs, x, alpha, beta, digits):
    """Sum coeffs[k] * monomial tails, re-running at higher precision when the
    alternating sum cancels away too many digits."""
    guard = 10
    for _ in range(4):
        with mp.workdps(digits + guard):
            xm = mp.mpf(x)
            terms = [
                c * _monomial_tail(kind, k, xm, alpha, beta)
                for k, c in enumerate(coeffs)
                if c != 0
            ]
            total = mp.fsum(terms)
            mag = mp.fsum([abs(t) for t in terms])
            if total == 0:
                loss = 0 if mag == 0 else guard
            else:
                loss = max(0, int(mp.log10(mag / abs(total))) + 1)
            if loss + 5 <= guard:
                err = mag * mp.mpf(10) ** (-(digits + guard - 2))
                return total, err
        guard = loss + 12
    return total, mag * mp.mpf(10) ** (-(digits + guard - 2))


def _weight_fn(kind, alpha, beta):
    if kind == "goe":
        return lambda t: mp.e ** (-t * t / 2)
    if kind == "gue":
        return lambda t: mp.e ** (-t * t)
    if kind == "wishart":
        a = (mp.mpf(alpha) - 1) / 2
        return lambda t: t**a * mp.e ** (-t / 2)
    if kind == "cwishart":
        a = mp.mpf(alpha)
        return lambda t: t**a * mp.e ** (-t)
    if kind == "beta":
        a, b = (mp.mpf(alpha) - 1) / 2, (mp.mpf(beta) - 1) / 2
        return lambda t: t**a * (1 - t) ** b
    a, b = mp.mpf(alpha), mp.mpf(beta)
    return lambda t: t**a * (1 - t) ** b


def _support(kind):
    if kind in ("goe", "gue"):
        return (mp.ninf, mp.inf)
    if kind in ("wishart", "cwishart", "condgoe"):
        return (mp.mpf(0), mp.inf)
    return (mp.mpf(0), mp.mpf(1))


@lru_cache(maxsize=32)
def _cond_goe_system(n: int, digits: int):
    ctx = PrecisionContext(digits=digits)
    return skewortho.build_system(skewortho.cond_goe_moments(ctx), n, ctx)


@lru_cache(maxsize=16)
def _custom_system(weight: skewortho.WeightSpec, n: int, digits: int):
    ctx = PrecisionContext(digits=digits)
    return skewortho.build_system(
        skewortho.QuadratureMoments(weight, ctx), n, ctx
    )


@lru_cache(maxsize=16)
def _custom_ortho(weight: skewortho.WeightSpec, n: int, digits: int):
    ctx = PrecisionContext(digits=digits)
    provider = skewortho.QuadratureMoments(weight, ctx)
    return skewortho.orthogonal_system(provider, n)


def _quad_tail(fn, lo, hi, x, ctx):
    """Integrate fn over (max(x, lo), hi) with a couple of interior splits."""
    a = max(mp.mpf(x), lo) if lo != mp.ninf else mp.mpf(x)
    if hi != mp.inf and a >= hi:
        return mp.mpf(0), mp.mpf(0)
    pts = []
    if hi == mp.inf:
        pts = [a + 2, a + 8]
    return quad(fn, a, hi, ctx, points=pts)


def eec_sym(e: EnsembleSpec, x, ctx: PrecisionContext = None) -> EECResult:
    """Expected Euler characteristic for a real-symmetric ensemble at ``x``.

    Closed-form ensembles (GOE, Wishart, beta) use the classical polynomial
    tables and incomplete gamma/beta reductions; the conditional GOE and
    custom weights build the skew-orthogonal system from moments and
    integrate by quadrature.
    """
    if e.symmetry_class != 1:
        raise ParamError(f"{e.kind} is not a real-symmetric ensemble")
    n = e.n
    if e.kind in CLOSED_FORM_KINDS:
        ctx = ctx or DEFAULT_CTX
        fam = _family_for(e)
        with ctx.workdps():
            gamma = poly.sigma_gamma_constants(fam, n - 1, ctx)[1]
        if n - 1 <= _DEGREE_SWITCH:
            p = poly.classical_poly(fam, n - 1, ctx)
            val, err = _tail_integral_termwise(
                e.kind, p.coeffs, x, e.alpha, e.beta_param, ctx.digits
            )
            with ctx.workdps():
                return EECResult(
                    x=float(x), value=val / gamma, method="closed_form",
                    err_est=float(err / gamma),
                )
        wctx = PrecisionContext(digits=max(ctx.digits, 25))
        wfn = _weight_fn(e.kind, e.alpha, e.beta_param)
        lo, hi = _support(e.kind)
        fn = lambda t: poly.classical_eval(fam, n - 1, t, wctx) * wfn(t)
        val, err = _quad_tail(fn, lo, hi, x, wctx)
        with wctx.workdps():
            return EECResult(
                x=float(x), value=val / gamma, method="quadrature",
                err_est=float(err / gamma),
            )

    ctx = ctx or HIGH_CTX
    if e.kind == "condgoe":
        sys = _cond_goe_system(n, ctx.digits)
        wfn = _weight_fn("goe", 0, 0)
        lo, hi = mp.mpf(0), mp.inf
    else:
        sys = _custom_system(e.weight, n, ctx.digits)
        lo, hi = (mp.mpf(e.weight.support[0]),
                  mp.inf if mp.isinf(mp.mpf(e.weight.support[1])) else mp.mpf(e.weight.support[1]))
        wfn = e.weight.fn
    phat = sys.phi_hat[n - 1]
    gamma = sys.gamma[n - 1]
    fn = lambda t: phat(t) * wfn(t)
    val, err = _quad_tail(fn, lo, hi, x, ctx)
    with ctx.workdps():
        return EECResult(
            x=float(x), value=val / gamma, method="quadrature",
            err_est=float(err / gamma),
        )


def _herm_hat_coeffs(fam, n, ctx):
    """Coefficients of phi_{n-1} phi_n' - phi_n phi_{n-1}' (monic, degree 2n-2)."""
    p = poly.classical_poly(fam, n - 1, ctx)
    q = poly.classical_poly(fam, n, ctx)
    with ctx.workdps():
        sc_q, sfam_q, si_q = poly.classical_derivative(fam, n)
        qp = [sc_q * c for c in poly.classical_poly(sfam_q, si_q, ctx).coeffs]
        if n - 1 >= 1:
            sc_p, sfam_p, si_p = poly.classical_derivative(fam, n - 1)
            pp = [sc_p * c for c in poly.classical_poly(sfam_p, si_p, ctx).coeffs]
        else:
            pp = [mp.mpf(0)]
        return _psub(_pmul(list(p.coeffs), qp), _pmul(list(q.coeffs), pp))


def _herm_hat_eval(fam, n, t, ctx):
    v_p = poly.classical_eval(fam, n - 1, t, ctx)
    v_q = poly.classical_eval(fam, n, t, ctx)
    sc_q, sfam_q, si_q = poly.classical_derivative(fam, n)
    d_q = sc_q * poly.classical_eval(sfam_q, si_q, t, ctx)
    if n - 1 >= 1:
        sc_p, sfam_p, si_p = poly.classical_derivative(fam, n - 1)
        d_p = sc_p * poly.classical_eval(sfam_p, si_p, t, ctx)
    else:
        d_p = mp.mpf(0)
    return v_p * d_q - v_q * d_p


def eec_herm(e: EnsembleSpec, x, ctx: PrecisionContext = None) -> EECResult:
    """Expected Euler characteristic for a Hermitian ensemble at ``x``.

    The result bounds the true tail of the largest eigenvalue from above at
    every threshold.
    """
    if e.symmetry_class != 2:
        raise ParamError(f"{e.kind} is not a Hermitian ensemble")
    n = e.n
    if e.kind in CLOSED_FORM_KINDS:
        ctx = ctx or DEFAULT_CTX
        fam = _family_for(e)
        h = poly.h_constant(fam, n - 1, ctx)
        if 2 * n - 2 <= _DEGREE_SWITCH:
            coeffs = _herm_hat_coeffs(fam, n, ctx)
            val, err = _tail_integral_termwise(
                e.kind, coeffs, x, e.alpha, e.beta_param, ctx.digits
            )
            with ctx.workdps():
                return EECResult(
                    x=float(x), value=val / h, method="closed_form",
                    err_est=float(err / h),
                )
        wctx = PrecisionContext(digits=max(ctx.digits, 25))
        wfn = _weight_fn(e.kind, e.alpha, e.beta_param)
        lo, hi = _support(e.kind)
        fn = lambda t: _herm_hat_eval(fam, n, t, wctx) * wfn(t)
        val, err = _quad_tail(fn, lo, hi, x, wctx)
        with wctx.workdps():
            return EECResult(
                x=float(x), value=val / h, method="quadrature",
                err_est=float(err / h),
            )

    ctx = ctx or HIGH_CTX
    phis, hs = _custom_ortho(e.weight, n + 1, ctx.digits)
    with ctx.workdps():
        coeffs = _psub(
            _pmul(list(phis[n - 1].coeffs), phis[n].derivative_coeffs()),
            _pmul(list(phis[n].coeffs), phis[n - 1].derivative_coeffs()),
        )
    lo = mp.mpf(e.weight.support[0])
    hi = mp.inf if mp.isinf(mp.mpf(e.weight.support[1])) else mp.mpf(e.weight.support[1])
    fn = lambda t: _peval(coeffs, t) * e.weight.fn(t)
    val, err = _quad_tail(fn, lo, hi, x, ctx)
    with ctx.workdps():
        return EECResult(
            x=float(x), value=val / hs[n - 1], method="quadrature",
            err_est=float(err / hs[n - 1]),
        )


def expected_euler_char(e: EnsembleSpec, x, ctx: PrecisionContext = None) -> EECResult:
    """Dispatch to :func:`eec_sym` or :func:`eec_herm` by symmetry class."""
    if e.symmetry_class == 1:
        return eec_sym(e, x, ctx)
    return eec_herm(e, x, ctx)


def edge_scaling(e: EnsembleSpec, m: int, ctx: PrecisionContext = DEFAULT_CTX) -> EdgeScaling:
    """Edge-asymptotic centering/scale (mu_m, sigma_m) of the matching family.

    Wishart and beta families plug in alpha/m (and beta/m) as the finite-size
    stand-ins for the limiting ratios.  The beta family degenerates when both
    ratios vanish (hard edge); that case raises DegenerateError rather than
    returning sigma = 0.
    """
    if m < 1:
        raise ParamError("scaling index m must be >= 1")
    with ctx.workdps():
        mm = mp.mpf(m)
        if e.kind in ("goe", "gue"):
            return EdgeScaling(mp.sqrt(2 * mm), mp.power(mm, -mp.mpf(1) / 6) / mp.sqrt(2))
        if e.kind in ("wishart", "cwishart"):
            ab = mp.mpf(e.alpha) / mm
            root = 1 + mp.sqrt(1 + ab)
            mu = root**2 * mm
            sigma = mp.power(root, mp.mpf(4) / 3) / mp.power(1 + ab, mp.mpf(1) / 6)
            return EdgeScaling(mu, sigma * mp.power(mm, mp.mpf(1) / 3))
        if e.kind in ("beta", "cbeta"):
            ab = mp.mpf(e.alpha) / mm
            bb = mp.mpf(e.beta_param) / mm
            denom = 2 + ab + bb
            phi = mp.acos((-ab + bb) / denom)
            gam = mp.acos((ab + bb) / denom)
            s_sum = mp.sin(phi + gam)
            if abs(s_sum) < mp.mpf(10) ** -12 or mp.sin(phi) == 0 or mp.sin(gam) == 0:
                raise DegenerateError(
                    "Jacobi edge scaling degenerates (sigma -> 0) at these "
                    "parameter ratios; no soft-edge normalization exists here"
                )
            mu = (1 - mp.cos(phi + gam)) / 2
            sigma = mp.power(
                2 * s_sum**4 / (denom**2 * mp.sin(phi) * mp.sin(gam)),
                mp.mpf(1) / 3,
            ) / 2
            return EdgeScaling(mu, sigma * mp.power(mm, -mp.mpf(2) / 3))
    raise ParamError(f"no edge scaling is defined for ensemble kind {e.kind!r}")


def eec_scaled(e: EnsembleSpec, s, ctx: PrecisionContext = None) -> EECResult:
    """EEC evaluated at the edge-scaled threshold x = mu_{n-1} + sigma_{n-1} s."""
    if e.n < 2:
        raise ParamError("edge scaling needs n >= 2")
    sc_ctx = ctx or DEFAULT_CTX
    es = edge_scaling(e, e.n - 1, sc_ctx)
    with sc_ctx.workdps():
        x = es.mu_n + es.sigma_n * mp.mpf(s)
    res = expected_euler_char(e, x, ctx)
    return EECResult(
        x=res.x, value=res.value, method=res.method, err_est=res.err_est, s=float(s)
    )


def finite_n_relative_error(e: EnsembleSpec, x, mc_estimate, ctx: PrecisionContext = None) -> RelativeError:
    """Relative error (EEC - p_hat)/p_hat against a Monte Carlo tail estimate.

    The standard error of the result is propagated from the estimate.  A zero
    p_hat makes the ratio meaningless and raises DegenerateError.
    """
    p = float(mc_estimate.p_hat)
    if p <= 0:
        raise DegenerateError("MC tail estimate is zero; relative error undefined")
    val = float(expected_euler_char(e, x, ctx).value)
    delta = (val - p) / p
    stderr = abs(val) / p**2 * float(mc_estimate.stderr)
    return RelativeError(delta, stderr)
