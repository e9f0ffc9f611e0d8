"""Classical monic polynomial families and their normalizing constants.

Three families appear throughout the package, each monic and indexed by
degree:

* ``HermiteMonic`` -- orthogonal for the weight exp(-x^2) on the line,
* ``LaguerreMonic(alpha)`` -- orthogonal for x^alpha exp(-x) on (0, inf),
* ``ShiftedJacobiMonic(alpha, beta)`` -- orthogonal for x^alpha (1-x)^beta
  on (0, 1), obtained from the standard Jacobi polynomial by the variable
  change x -> 1 - 2x together with a (-1)^n sign that restores monicity.

Coefficient vectors are built from the monic three-term recurrences; point
evaluation should also go through :func:`classical_eval`, which runs the
recurrence directly and stays well conditioned at degrees where expanded
coefficients lose accuracy.  The same family objects also key the
skew-orthogonality constants ``sigma_k`` and ``gamma_n`` of the matching
square-root weights (exp(-x^2/2), x^{(alpha-1)/2} exp(-x/2), ...) used by
the real-symmetric ensembles; see :func:`sigma_gamma_constants`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from mpmath import mp

from .errors import DegreeError, ParamError
from .specfun import DEFAULT_CTX, PrecisionContext


@dataclass(frozen=True)
class HermiteMonic:
    pass


@dataclass(frozen=True)
class LaguerreMonic:
    alpha: float


@dataclass(frozen=True)
class ShiftedJacobiMonic:
    alpha: float
    beta: float


ClassicalFamily = Union[HermiteMonic, LaguerreMonic, ShiftedJacobiMonic]


def _check_family(family: ClassicalFamily) -> None:
    if isinstance(family, HermiteMonic):
        return
    if isinstance(family, LaguerreMonic):
        if not float(family.alpha) > -1:
            raise ParamError(f"LaguerreMonic requires alpha > -1, got {family.alpha}")
        return
    if isinstance(family, ShiftedJacobiMonic):
        if not (float(family.alpha) > -1 and float(family.beta) > -1):
            raise ParamError(
                f"ShiftedJacobiMonic requires alpha, beta > -1, got "
                f"({family.alpha}, {family.beta})"
            )
        return
    raise ParamError(f"unknown polynomial family {family!r}")


# ---------------------------------------------------------------------------
# dense coefficient helpers (ascending order, mpf entries)

def _pzero(n):
    return [mp.mpf(0)] * n


def _padd(p, q):
    out = _pzero(max(len(p), len(q)))
    for i, c in enumerate(p):
        out[i] += c
    for i, c in enumerate(q):
        out[i] += c
    return out


def _pscale(p, c):
    return [c * v for v in p]


def _psub(p, q):
    return _padd(p, _pscale(q, mp.mpf(-1)))


def _pmul(p, q):
    out = _pzero(len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a:
            for j, b in enumerate(q):
                out[i + j] += a * b
    return out


def _pshift(p):
    """Multiply by x."""
    return [mp.mpf(0)] + list(p)


def _pdiff(p):
    if len(p) <= 1:
        return [mp.mpf(0)]
    return [i * c for i, c in enumerate(p)][1:]


def _peval(p, x):
    acc = mp.mpf(0)
    for c in reversed(p):
        acc = acc * x + c
    return acc


class MonicPoly:
    """Monic univariate polynomial with dense coefficients.

    ``coeffs[i]`` multiplies ``x**i``; the leading coefficient is exactly 1.
    Instances are immutable value objects.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        coeffs = tuple(c if isinstance(c, mp.mpf) else mp.mpf(c) for c in coeffs)
        if not coeffs or coeffs[-1] != 1:
            raise DegreeError("MonicPoly requires a leading coefficient of exactly 1")
        object.__setattr__(self, "coeffs", coeffs)

    def __setattr__(self, name, value):
        raise AttributeError("MonicPoly is immutable")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x):
        return _peval(self.coeffs, x)

    def derivative_coeffs(self):
        """Coefficients of the (generally non-monic) derivative."""
        return _pdiff(self.coeffs)

    def add_scaled(self, c, other: "MonicPoly") -> "MonicPoly":
        """self + c * other, valid when other has strictly smaller degree."""
        if other.degree >= self.degree:
            raise DegreeError("add_scaled would break monicity")
        return MonicPoly(_padd(self.coeffs, _pscale(other.coeffs, mp.mpf(c))))

    def __eq__(self, other):
        return isinstance(other, MonicPoly) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"MonicPoly(degree={self.degree})"


# ---------------------------------------------------------------------------
# three-term recurrences

def _recurrence_ab(family: ClassicalFamily, k: int):
    """Coefficients (a_k, b_k) of p_{k+1} = (x - a_k) p_k - b_k p_{k-1}."""
    if isinstance(family, HermiteMonic):
        return mp.mpf(0), mp.mpf(k) / 2
    if isinstance(family, LaguerreMonic):
        al = mp.mpf(family.alpha)
        return 2 * k + al + 1, mp.mpf(k) * (k + al)
    al, be = mp.mpf(family.alpha), mp.mpf(family.beta)
    if k == 0:
        a = (be - al) / (al + be + 2)
        b = mp.mpf(0)
    else:
        a = (be**2 - al**2) / ((2 * k + al + be) * (2 * k + al + be + 2))
        # b_k = h_k / h_{k-1} from the closed-form norms; already expressed in
        # the shifted variable, pole-free for k >= 1 and alpha, beta > -1
        b = (
            k
            * (k + al)
            * (k + be)
            * (k + al + be)
            / (
                (2 * k + al + be) ** 2
                * (2 * k + al + be + 1)
                * (2 * k + al + be - 1)
            )
        )
    # shifted variable x = (1 - t)/2 halves the linear coefficient
    return (1 - a) / 2, b


def classical_poly(
    family: ClassicalFamily, n: int, ctx: PrecisionContext = DEFAULT_CTX
) -> MonicPoly:
    """Monic family member of degree ``n`` as a coefficient vector."""
    _check_family(family)
    if n < 0:
        raise ParamError("degree must be non-negative")
    with ctx.workdps():
        prev = [mp.mpf(1)]
        if n == 0:
            return MonicPoly(prev)
        cur = _psub(_pshift(prev), [_recurrence_ab(family, 0)[0]])
        for k in range(1, n):
            a, b = _recurrence_ab(family, k)
            nxt = _psub(_psub(_pshift(cur), _pscale(cur, a)), _pscale(prev, b))
            prev, cur = cur, nxt
        return MonicPoly(cur)


def classical_eval(family: ClassicalFamily, n: int, x, ctx: PrecisionContext = DEFAULT_CTX):
    """Evaluate the degree-``n`` family member at ``x`` by the recurrence.

    This path is the authoritative one for point values; it avoids the
    cancellation that expanded coefficients suffer at high degree.
    """
    _check_family(family)
    if n < 0:
        raise ParamError("degree must be non-negative")
    with ctx.workdps():
        xm = x if isinstance(x, mp.mpf) else mp.mpf(x)
        prev, cur = mp.mpf(1), None
        if n == 0:
            return prev
        cur = xm - _recurrence_ab(family, 0)[0]
        for k in range(1, n):
            a, b = _recurrence_ab(family, k)
            prev, cur = cur, (xm - a) * cur - b * prev
        return cur


def classical_derivative(family: ClassicalFamily, n: int):
    """Derivative identity: phi_n' = scale * (shifted family member).

    Returns ``(scale, shifted_family, index)`` with ``scale = n`` and
    ``index = n - 1``; Hermite stays in family, Laguerre shifts alpha by one,
    Jacobi shifts both parameters by one.
    """
    _check_family(family)
    if n < 1:
        raise ParamError("derivative identity requires n >= 1")
    if isinstance(family, HermiteMonic):
        shifted = HermiteMonic()
    elif isinstance(family, LaguerreMonic):
        shifted = LaguerreMonic(family.alpha + 1)
    else:
        shifted = ShiftedJacobiMonic(family.alpha + 1, family.beta + 1)
    return n, shifted, n - 1


def h_constant(family: ClassicalFamily, n: int, ctx: PrecisionContext = DEFAULT_CTX):
    """Orthonormalizing constant h_n = integral of phi_n^2 against the weight."""
    _check_family(family)
    if n < 0:
        raise ParamError("index must be non-negative")
    with ctx.workdps():
        nm = mp.mpf(n)
        if isinstance(family, HermiteMonic):
            return mp.power(2, -nm) * mp.sqrt(mp.pi) * mp.factorial(n)
        if isinstance(family, LaguerreMonic):
            al = mp.mpf(family.alpha)
            return mp.factorial(n) * mp.gamma(nm + al + 1)
        al, be = mp.mpf(family.alpha), mp.mpf(family.beta)
        return (
            mp.factorial(n)
            * mp.gamma(nm + al + 1)
            * mp.gamma(nm + be + 1)
            * mp.gamma(nm + al + be + 1)
            / (mp.gamma(2 * nm + al + be + 1) * mp.gamma(2 * nm + al + be + 2))
        )


def sigma_gamma_constants(
    family: ClassicalFamily, index: int, ctx: PrecisionContext = DEFAULT_CTX
):
    """Skew-orthogonality constants (sigma_k, gamma_n) at ``index``.

    These belong to the square-root counterparts of the family weights:
    exp(-x^2/2) for Hermite, x^{(alpha-1)/2} exp(-x/2) for Laguerre, and
    x^{(alpha-1)/2} (1-x)^{(beta-1)/2} for shifted Jacobi.  The same index is
    applied to both constants.
    """
    _check_family(family)
    if index < 0:
        raise ParamError("index must be non-negative")
    with ctx.workdps():
        k = mp.mpf(index)
        n = mp.mpf(index)
        if isinstance(family, HermiteMonic):
            sigma = mp.power(2, -2 * k + 1) * mp.sqrt(mp.pi) * mp.factorial(2 * index)
            gamma = mp.sqrt(2) * mp.gamma((n + 1) / 2)
            return sigma, gamma
        if isinstance(family, LaguerreMonic):
            al = mp.mpf(family.alpha)
            sigma = 4 * mp.factorial(2 * index) * mp.gamma(2 * k + al + 1)
            gamma = (
                mp.power(2, n + (al + 1) / 2)
                / mp.sqrt(mp.pi)
                * mp.gamma((n + 1) / 2)
                * mp.gamma((n + al + 1) / 2)
            )
            return sigma, gamma
        al, be = mp.mpf(family.alpha), mp.mpf(family.beta)
        sigma = (
            4
            * mp.gamma(2 * k + 1)
            * mp.gamma(2 * k + al + 1)
            * mp.gamma(2 * k + be + 1)
            * mp.gamma(2 * k + al + be + 1)
            / (mp.gamma(4 * k + al + be + 1) * mp.gamma(4 * k + al + be + 3))
        )
        gamma = (
            mp.power(2, 2 * n + al + be)
            * mp.gamma((n + 1) / 2)
            * mp.gamma((n + al + 1) / 2)
            * mp.gamma((n + be + 1) / 2)
            * mp.gamma((n + al + be + 1) / 2)
            / (mp.pi * mp.gamma(2 * n + al + be + 1))
        )
        return sigma, gamma


def table_skew_phi(
    family: ClassicalFamily, n: int, ctx: PrecisionContext = DEFAULT_CTX
) -> MonicPoly:
    """Closed-form skew-orthogonal polynomial for the square-root weights.

    Even degrees coincide with the family member itself; odd degrees subtract
    a multiple of the member two degrees down.  Used as the golden reference
    for the general moment-based constructor.
    """
    _check_family(family)
    if n < 0:
        raise ParamError("degree must be non-negative")
    base = classical_poly(family, n, ctx)
    if n % 2 == 0 or n == 1:
        return base
    k = (n - 1) // 2
    with ctx.workdps():
        if isinstance(family, HermiteMonic):
            coef = mp.mpf(k)
        elif isinstance(family, LaguerreMonic):
            al = mp.mpf(family.alpha)
            coef = 2 * k * (2 * k + al)
        else:
            al, be = mp.mpf(family.alpha), mp.mpf(family.beta)
            coef = (
                2
                * k
                * (2 * k + al)
                * (2 * k + be)
                * (2 * k + al + be)
                / (
                    (4 * k + al + be + 2)
                    * (4 * k + al + be + 1)
                    * (4 * k + al + be)
                    * (4 * k + al + be - 1)
                )
            )
        lower = classical_poly(family, n - 2, ctx)
        return base.add_scaled(-coef, lower)


def companion_matrix(polys):
    """Recurrence matrix L_n of a monic system of degrees 0..n.

    The returned n x n matrix is lower Hessenberg with unit superdiagonal and
    satisfies x * Phi = L Phi + e_n * phi_n, where Phi stacks the first n
    polynomials; consequently det(x I - L_i) reproduces phi_i.
    """
    n = len(polys) - 1
    if n < 1:
        raise DegreeError("need polynomials of degrees 0..n with n >= 1")
    for i, p in enumerate(polys):
        if not isinstance(p, MonicPoly) or p.degree != i:
            raise DegreeError(f"polys[{i}] must be monic of degree {i}")
    L = [[mp.mpf(0)] * n for _ in range(n)]
    for i in range(n):
        rem = _psub(_pshift(polys[i].coeffs), polys[i + 1].coeffs)
        for d in range(i, -1, -1):
            t = rem[d] if d < len(rem) else mp.mpf(0)
            L[i][d] = t
            if t:
                rem = _psub(rem, _pscale(polys[d].coeffs, t))
        if i + 1 < n:
            L[i][i + 1] = mp.mpf(1)
    return L
