"""Skew-orthogonal polynomial systems built from moments.

The construction proceeds in two stages on the skew-moment matrix
``S = (s_ij)`` of a weight ``w``:

1. 2x2 block-wise Gaussian elimination finds an upper-triangular change of
   basis with unit diagonal that brings S to the canonical block form
   diag(sigma_0 J, sigma_1 J, ...), J = [[0, 1], [-1, 0]].  The pivots
   sigma_k are the skew norms.
2. A shear inside each 2x2 block (which leaves the block form invariant)
   zeroes the integrals of the odd-degree members against the weight.  This
   side condition pins the system down uniquely; odd-index gamma values are
   then defined through gamma_{2k+1} = sigma_k / gamma_{2k}.

Columns of the resulting matrix are the coefficient vectors of the monic
skew-orthogonal polynomials.  The module also provides the expected
eigenpolynomial (phi-hat) attached to a system, the normalizing constants of
the eigenvalue densities, Pfaffians via the same block elimination, moment
providers for the built-in weights (with closed-form skew-moment
recursions), and a brute-force quadrature oracle for the ordered-region
integral identity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from mpmath import mp

from .errors import (
    ConvergenceError,
    MomentError,
    ParamError,
    PivotError,
    RangeError,
    SkewError,
)
from .poly import MonicPoly, _padd, _pscale
from .specfun import HIGH_CTX, PrecisionContext, quad


# ---------------------------------------------------------------------------
# Pfaffian

def pfaffian(S, tol: float = 1e-10):
    """Pfaffian of a skew-symmetric matrix by 2x2 block elimination.

    Row/column transpositions provide pivoting (each flips the sign).  Odd
    dimension returns 0 exactly.  Entries may be floats or mpf; the result
    keeps the input arithmetic.

    Raises
    ------
    SkewError
        If ``S + S^T`` deviates from zero by more than ``tol`` relative to
        the largest entry.
    """
    A = [list(row) for row in S]
    n = len(A)
    if any(len(row) != n for row in A):
        raise SkewError("pfaffian requires a square matrix")
    scale = max((abs(A[i][j]) for i in range(n) for j in range(n)), default=0)
    bound = tol * max(1.0, float(scale))
    for i in range(n):
        for j in range(i, n):
            if abs(A[i][j] + A[j][i]) > bound:
                raise SkewError(
                    f"matrix is not skew-symmetric at ({i},{j}) within {bound}"
                )
    if n == 0:
        return 1
    if n % 2 == 1:
        return 0 * A[0][0]
    sign = 1
    result = 1 + 0 * A[0][0]
    for k in range(0, n, 2):
        piv = max(range(k + 1, n), key=lambda j: abs(A[k][j]))
        if A[k][piv] == 0:
            return 0 * A[0][0]
        if piv != k + 1:
            for r in range(n):
                A[r][k + 1], A[r][piv] = A[r][piv], A[r][k + 1]
            A[k + 1], A[piv] = A[piv], A[k + 1]
            sign = -sign
        a = A[k][k + 1]
        result = result * a
        for i in range(k + 2, n):
            for j in range(i + 1, n):
                upd = (A[i][k + 1] * A[k][j] - A[i][k] * A[k + 1][j]) / a
                A[i][j] = A[i][j] - upd
                A[j][i] = -A[i][j]
    return sign * result


# ---------------------------------------------------------------------------
# moment providers

class MomentProvider:
    """Supplier of ordinary moments mu_i and skew moments s_ij of a weight.

    Subclasses implement ``_mu(i)`` and ``_skew_formula(i, j)`` (the latter
    only for j >= 1; antisymmetry and the zero diagonal are handled here).
    Values are memoized, so instances behave as pure read-only tables after
    warm-up; concurrent readers at worst recompute an identical entry.
    """

    def __init__(self, ctx: PrecisionContext = HIGH_CTX):
        self.ctx = ctx
        self._mu_cache = {}
        self._skew_cache = {}

    def mu(self, i: int):
        if i < 0:
            raise RangeError("moment index must be non-negative")
        if i not in self._mu_cache:
            with self.ctx.workdps():
                val = self._mu(i)
            self._mu_cache[i] = val
        return self._mu_cache[i]

    def skew(self, i: int, j: int):
        if i < 0 or j < 0:
            raise RangeError("skew-moment indices must be non-negative")
        if i == j:
            return mp.mpf(0)
        key = (i, j)
        if key not in self._skew_cache:
            with self.ctx.workdps():
                if i > j:
                    val = -self.skew(j, i)
                else:
                    val = self._skew_formula(i, j)
            self._skew_cache[key] = val
        return self._skew_cache[key]

    def _mu(self, i):
        raise NotImplementedError

    def _skew_formula(self, i, j):
        raise NotImplementedError


class GaussianWeightMoments(MomentProvider):
    """Weight exp(-x^2/2) on the whole line.

    The skew-moment recursion follows from integration by parts in the
    second slot and bottoms out in ordinary Gaussian moments:
    s_ij = 2 * g(i+j-1) + (j-1) s_{i,j-2} with g(m) the full-line moment of
    exp(-x^2) (zero for odd m).
    """

    def _mu(self, i):
        if i % 2 == 1:
            return mp.mpf(0)
        return mp.power(2, mp.mpf(i + 1) / 2) * mp.gamma(mp.mpf(i + 1) / 2)

    @staticmethod
    def _g2(m):
        if m % 2 == 1:
            return mp.mpf(0)
        return mp.gamma(mp.mpf(m + 1) / 2)

    def _skew_formula(self, i, j):
        val = 2 * self._g2(i + j - 1)
        if j >= 2:
            val += (j - 1) * self.skew(i, j - 2)
        return val


class ConditionalGOEMoments(MomentProvider):
    """Weight exp(-x^2/2) restricted to x > 0 (positive definite GOE).

    Moments are half-Gaussian, mu_i = 2^{(i-1)/2} Gamma((i+1)/2).  The
    boundary at zero adds a correction term to the integration-by-parts
    recursion at j = 1.
    """

    def _mu(self, i):
        return mp.power(2, mp.mpf(i - 1) / 2) * mp.gamma(mp.mpf(i + 1) / 2)

    def _skew_formula(self, i, j):
        # 2 * int_0^inf x^(i+j-1) e^{-x^2} dx = Gamma((i+j)/2)
        val = mp.gamma(mp.mpf(i + j) / 2)
        if j == 1:
            val -= self.mu(i)
        if j >= 2:
            val += (j - 1) * self.skew(i, j - 2)
        return val


class LaguerreWeightMoments(MomentProvider):
    """Weight x^{(alpha-1)/2} exp(-x/2) on (0, inf), alpha > -1."""

    def __init__(self, alpha, ctx: PrecisionContext = HIGH_CTX):
        if not float(alpha) > -1:
            raise ParamError(f"Laguerre weight requires alpha > -1, got {alpha}")
        super().__init__(ctx)
        self.alpha = alpha

    def _mu(self, i):
        al = mp.mpf(self.alpha)
        return mp.power(2, i + (al + 1) / 2) * mp.gamma(i + (al + 1) / 2)

    def _skew_formula(self, i, j):
        al = mp.mpf(self.alpha)
        val = 4 * mp.gamma(i + j + al)
        if j >= 1:
            val += (2 * j + al - 1) * self.skew(i, j - 1)
        return val


class JacobiWeightMoments(MomentProvider):
    """Weight x^{(alpha-1)/2} (1-x)^{(beta-1)/2} on (0, 1), alpha, beta > -1."""

    def __init__(self, alpha, beta, ctx: PrecisionContext = HIGH_CTX):
        if not (float(alpha) > -1 and float(beta) > -1):
            raise ParamError(
                f"Jacobi weight requires alpha, beta > -1, got ({alpha}, {beta})"
            )
        super().__init__(ctx)
        self.alpha = alpha
        self.beta = beta

    def _mu(self, i):
        al, be = mp.mpf(self.alpha), mp.mpf(self.beta)
        return mp.beta(i + (al + 1) / 2, (be + 1) / 2)

    def _skew_formula(self, i, j):
        al, be = mp.mpf(self.alpha), mp.mpf(self.beta)
        val = 4 * mp.beta(i + j + al, be + 1)
        if j >= 1:
            val += (2 * j + al - 1) * self.skew(i, j - 1)
        return val / (2 * j + al + be)


@dataclass(frozen=True)
class WeightSpec:
    """Custom weight declaration consumed by the quadrature moment provider.

    ``support`` is an (a, b) pair, b possibly infinite; ``fn`` evaluates the
    weight pointwise at mpf arguments; ``moments`` optionally overrides the
    ordinary moments mu_i with closed-form values.
    """

    support: tuple
    fn: Callable
    moments: Optional[tuple] = None
    name: str = "custom"


class QuadratureMoments(MomentProvider):
    """Moments of a custom weight obtained by adaptive quadrature.

    The double integral defining s_ij is reduced to nested one-dimensional
    quadratures through s_ij = int x^i w(x) [mu_j - 2 M_j(x)] dx, where
    M_j(x) is the partial moment up to x.  Weights without enough finite
    moments surface as MomentError.
    """

    def __init__(self, spec: WeightSpec, ctx: PrecisionContext = HIGH_CTX):
        super().__init__(ctx)
        self.spec = spec
        self._inner_ctx = PrecisionContext(
            digits=ctx.digits + 5,
            abs_tol=ctx.abs_tol / 100,
            rel_tol=ctx.rel_tol / 100,
        )

    def _mu(self, i):
        if self.spec.moments is not None and i < len(self.spec.moments):
            return mp.mpf(self.spec.moments[i])
        a, b = self.spec.support
        try:
            val, _ = quad(lambda x: x**i * self.spec.fn(x), a, b, self.ctx)
        except ConvergenceError as exc:
            raise MomentError(f"moment mu_{i} did not converge: {exc}") from exc
        return val

    def _partial(self, j, x):
        a, _ = self.spec.support
        val, _ = quad(lambda y: y**j * self.spec.fn(y), a, x, self._inner_ctx)
        return val

    def _skew_formula(self, i, j):
        a, b = self.spec.support
        mu_j = self.mu(j)

        def outer(x):
            return x**i * self.spec.fn(x) * (mu_j - 2 * self._partial(j, x))

        try:
            val, _ = quad(outer, a, b, self.ctx)
        except ConvergenceError as exc:
            raise MomentError(f"skew moment s_{i}{j} did not converge: {exc}") from exc
        return val


def cond_goe_moments(ctx: PrecisionContext = HIGH_CTX) -> ConditionalGOEMoments:
    """Moment provider for the positive definite conditional GOE weight."""
    return ConditionalGOEMoments(ctx)


# ---------------------------------------------------------------------------
# the skew-orthogonal system

@dataclass(frozen=True)
class SkewOrthoSystem:
    """The unique monic skew-orthogonal system of a weight, up to size n.

    ``U`` is the upper-triangular unit-diagonal change of basis from the
    monomials; columns 0..n-1 hold the coefficients of phi_0..phi_{n-1}.
    ``sigma`` are the skew norms, ``gamma`` the side-condition constants
    (odd entries via gamma_{2k+1} = sigma_k / gamma_{2k}), ``phi_hat`` the
    expected eigenpolynomials.  Instances are immutable.
    """

    n: int
    U: tuple
    sigma: tuple
    gamma: tuple
    phi: tuple
    phi_hat: tuple
    ctx: PrecisionContext


def build_system(m: MomentProvider, n: int, ctx: PrecisionContext = None) -> SkewOrthoSystem:
    """Construct the unique skew-orthogonal system of size ``n``.

    Block elimination of the skew-moment matrix yields the skew norms
    sigma_k; the subsequent shear normalization zeroes the odd side
    conditions.  Raises :class:`PivotError` when a pivot falls below
    ``10**-(digits-10)`` times the largest skew moment (raise the working
    precision) or when an even side-condition value loses positivity.
    """
    if n < 1:
        raise ParamError("system size must be at least 1")
    ctx = ctx or m.ctx
    with ctx.workdps():
        S = [[m.skew(i, j) for j in range(n)] for i in range(n)]
        mu = [m.mu(i) for i in range(n)]
        smax = max((abs(S[i][j]) for i in range(n) for j in range(n)), default=mp.mpf(1))
        thresh = mp.mpf(10) ** (-(ctx.digits - 10)) * max(smax, mp.mpf(1))

        T = [row[:] for row in S]
        U = [[mp.mpf(1) if i == j else mp.mpf(0) for j in range(n)] for i in range(n)]
        sigma = []
        for k in range(0, n - 1, 2):
            a = T[k][k + 1]
            if not a > thresh:
                raise PivotError(
                    f"pivot sigma_{k // 2} = {mp.nstr(a, 8)} below threshold "
                    f"{mp.nstr(thresh, 4)}; raise the working precision",
                    principal_size=k + 2,
                )
            sigma.append(a)
            for j in range(k + 2, n):
                c0 = -T[k + 1][j] / a
                c1 = T[k][j] / a
                if c0 == 0 and c1 == 0:
                    continue
                for r in range(n):
                    T[r][j] -= c0 * T[r][k] + c1 * T[r][k + 1]
                for c in range(n):
                    T[j][c] -= c0 * T[k][c] + c1 * T[k + 1][c]
                for r in range(j + 1):
                    U[r][j] -= c0 * U[r][k] + c1 * U[r][k + 1]

        gtilde = [sum(mu[i] * U[i][j] for i in range(j + 1)) for j in range(n)]
        gamma = [mp.mpf(0)] * n
        for i in range(0, n, 2):
            if not gtilde[i] > 0:
                raise PivotError(
                    f"side-condition value gamma_{i} = {mp.nstr(gtilde[i], 8)} "
                    "lost positivity; raise the working precision",
                    principal_size=i + 1,
                )
            gamma[i] = gtilde[i]
            if i + 1 < n:
                t = gtilde[i + 1] / gtilde[i]
                if t != 0:
                    for r in range(i + 2):
                        U[r][i + 1] -= t * U[r][i]
                gamma[i + 1] = sigma[i // 2] / gtilde[i]

        phi = tuple(MonicPoly([U[r][j] for r in range(j + 1)]) for j in range(n))
        phi_hat = []
        for i in range(n):
            if i % 2 == 0 or i == 1:
                phi_hat.append(phi[i])
                continue
            p = phi[i]
            for k in range(i - 2, 0, -2):
                p = p.add_scaled(gamma[i] / gamma[k], phi[k])
            phi_hat.append(p)

        return SkewOrthoSystem(
            n=n,
            U=tuple(tuple(row) for row in U),
            sigma=tuple(sigma),
            gamma=tuple(gamma),
            phi=phi,
            phi_hat=tuple(phi_hat),
            ctx=ctx,
        )


def hat_varphi(sys: SkewOrthoSystem, n: int) -> MonicPoly:
    """Expected eigenpolynomial of degree ``n`` attached to the system.

    Equals phi_n for even n and phi_n plus the gamma-weighted sum of the
    lower odd members for odd n; the system must cover degree n.
    """
    if not 0 <= n < sys.n:
        raise RangeError(f"system of size {sys.n} does not cover degree {n}")
    return sys.phi_hat[n]


def inverse_relation(sys: SkewOrthoSystem, n: int) -> MonicPoly:
    """Recover phi_n from the expected eigenpolynomials for odd n >= 3."""
    if n % 2 == 0 or n < 3:
        raise RangeError("inverse relation applies to odd n >= 3")
    if n >= sys.n:
        raise RangeError(f"system of size {sys.n} does not cover degree {n}")
    ratio = sys.gamma[n] / sys.gamma[n - 2]
    return sys.phi_hat[n].add_scaled(-ratio, sys.phi_hat[n - 2])


def norm_const_sym(sys: SkewOrthoSystem, n: int):
    """Reciprocal normalizing constant of the beta=1 eigenvalue density.

    Product of the skew norms, with a trailing gamma_{n-1} factor for odd n.
    """
    if not 1 <= n <= sys.n:
        raise RangeError(f"system of size {sys.n} does not cover size {n}")
    with sys.ctx.workdps():
        out = mp.mpf(1)
        for k in range(n // 2):
            out *= sys.sigma[k]
        if n % 2 == 1:
            out *= sys.gamma[n - 1]
        return out


def norm_const_herm(family_h: Sequence):
    """Reciprocal normalizing constant of the beta=2 density: prod of h_i."""
    out = mp.mpf(1)
    for h in family_h:
        out *= mp.mpf(h) if not isinstance(h, mp.mpf) else h
    return out


def orthogonal_system(m: MomentProvider, n: int):
    """Monic orthogonal polynomials and norms h_i from moments, i < n.

    Gram-Schmidt against the moment functional; used for Hermitian custom
    weights where no classical family applies.
    """
    if n < 1:
        raise ParamError("system size must be at least 1")
    with m.ctx.workdps():
        try:
            mu = [m.mu(i) for i in range(2 * n - 1)]
        except MomentError:
            raise
        phis = []
        hs = []
        for i in range(n):
            coeffs = [mp.mpf(0)] * i + [mp.mpf(1)]
            for j in range(i):
                # <x^i, phi_j> with respect to the weight
                inner = sum(phis[j].coeffs[k] * mu[i + k] for k in range(j + 1))
                coeffs = _padd(coeffs, _pscale(list(phis[j].coeffs), -inner / hs[j]))
            p = MonicPoly(coeffs)
            h = sum(p.coeffs[k] * mu[i + k] for k in range(i + 1))
            if not h > 0:
                raise MomentError(
                    f"moment matrix lost positive definiteness at order {i}; "
                    "raise the working precision"
                )
            phis.append(p)
            hs.append(h)
        return phis, hs


# ---------------------------------------------------------------------------
# ordered-region integral oracle

def _gauss_nodes(n, a, b):
    x, w = np.polynomial.legendre.leggauss(n)
    x = 0.5 * (b - a) * x + 0.5 * (b + a)
    w = 0.5 * (b - a) * w
    return x, w


def _auto_cut(w, a):
    """Truncation point for an infinite support: where the weight dies off."""
    ref = max(abs(w(a + 0.25 * t)) for t in range(1, 41))
    x = a + 10.0
    while x < a + 400.0:
        if abs(w(x)) < 1e-20 * ref:
            return x
        x += 2.0
    return x


def pf_int_oracle(weight: WeightSpec, polys, n: int):
    """Both sides of the ordered-integral / Pfaffian identity, for n in {2, 3}.

    lhs: nested Gauss-Legendre quadrature of the ordered-region integral of
    prod w(l_i) * prod (l_j - l_i).  rhs: the Pfaffian of the skew bracket
    matrix of the supplied monic polynomials (bordered with their plain
    integrals for odd n).  A two-resolution consistency check guards the
    quadrature; disagreement raises ConvergenceError.
    """
    if n not in (2, 3):
        raise ParamError("oracle supports n = 2 or 3 only")
    if len(polys) < n:
        raise ParamError(f"need {n} polynomials")
    a, b = weight.support
    wfn = lambda x: float(weight.fn(x))
    bf = float(b) if not math.isinf(float(b)) else _auto_cut(wfn, float(a))
    af = float(a)
    pcs = [np.array([float(c) for c in p.coeffs]) for p in polys[:n]]
    pev = [lambda x, c=c: np.polynomial.polynomial.polyval(x, c) for c in pcs]

    def lhs_at(N):
        z, wz = _gauss_nodes(N, af, bf)
        wz_dens = np.array([wfn(t) for t in z]) * wz
        if n == 2:
            total = 0.0
            for zi, wzi in zip(z, wz_dens):
                y, wy = _gauss_nodes(N, af, zi)
                fy = np.array([wfn(t) for t in y])
                total += wzi * np.sum(wy * fy * (zi - y))
            return total
        total = 0.0
        for zi, wzi in zip(z, wz_dens):
            y, wy = _gauss_nodes(N, af, zi)
            fy = np.array([wfn(t) for t in y])
            inner = 0.0
            acc = np.zeros_like(y)
            for idx, (yj, wyj) in enumerate(zip(y, wy)):
                x, wx = _gauss_nodes(N, af, yj)
                fx = np.array([wfn(t) for t in x])
                acc[idx] = np.sum(wx * fx * (yj - x) * (zi - x))
            inner = np.sum(wy * fy * (zi - y) * acc)
            total += wzi * inner
        return total

    def bracket_at(N, p, q):
        y, wy = _gauss_nodes(N, af, bf)
        fy = np.array([wfn(t) for t in y])
        tot_p = None
        partial = np.zeros_like(y)
        for idx, yj in enumerate(y):
            x, wx = _gauss_nodes(N, af, yj)
            fx = np.array([wfn(t) for t in x])
            partial[idx] = np.sum(wx * fx * p(x))
        xfull, wfull = _gauss_nodes(N, af, bf)
        tot_p = np.sum(wfull * np.array([wfn(t) for t in xfull]) * p(xfull))
        return np.sum(wy * fy * q(y) * (2.0 * partial - tot_p))

    def rhs_at(N):
        S = [[0.0] * n for _ in range(n)]
        for i in range(n):
            for j in range(i + 1, n):
                S[i][j] = bracket_at(N, pev[i], pev[j])
                S[j][i] = -S[i][j]
        if n % 2 == 0:
            return pfaffian(S, tol=1e-6)
        x, w = _gauss_nodes(N, af, bf)
        fw = np.array([wfn(t) for t in x])
        svec = [float(np.sum(w * fw * pev[i](x))) for i in range(n)]
        B = [row + [svec[i]] for i, row in enumerate(S)]
        B.append([-s for s in svec] + [0.0])
        return pfaffian(B, tol=1e-6)

    N = 80
    lhs, rhs = lhs_at(N), rhs_at(N)
    lhs2, rhs2 = lhs_at(int(N * 1.5)), rhs_at(int(N * 1.5))
    scale = max(abs(lhs2), abs(rhs2), 1e-30)
    if abs(lhs - lhs2) > 1e-7 * scale or abs(rhs - rhs2) > 1e-7 * scale:
        raise ConvergenceError(
            "ordered-integral oracle did not converge", value=lhs2, err_est=abs(lhs - lhs2)
        )
    return lhs2, rhs2
