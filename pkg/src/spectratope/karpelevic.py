"""Karpelevic arcs, Ito polynomials and the region of stochastic eigenvalues.

The region ``Theta_n`` of eigenvalues of n-by-n stochastic matrices meets the
unit circle at ``exp(2 pi i p/q)`` for the Farey fractions ``p/q`` of order n;
consecutive points are joined by arcs traced by a root of the Ito polynomial

    t^s (t^q - beta)^m - alpha^m t^(q m),   m = floor(n/q),  beta = 1 - alpha,

where ``p/q`` and ``r/s`` are the endpoints with ``q <= s``. At ``alpha = 1``
the traced root sits at ``exp(2 pi i r/s)`` and at ``alpha = 0`` at
``exp(2 pi i p/q)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from numpy.polynomial import polynomial as P

from .circulants import circulant
from .exceptions import (
    AlphaOutOfRange,
    BranchTrackingFailure,
    InvalidEndpoints,
    MultipleRoots,
    NoConvergence,
    NotInRegion,
    WrongArcType,
)
from .numerics import DEFAULT_TOL, Tolerance, as_vector, determinant
from .perron import PerronSimilarity, as_similarity, in_spectratope

CLUSTER_DISTANCE = 1e-7
MAX_SWEEPS = 500
JUMP_THRESHOLD = 0.2
MIN_ARC_STEPS = 64
MAX_REFINE = 8
RESULTANT_RTOL = 1e-14
CLOSED_FORM_RTOL = 1e-13


def farey_fractions(n: int) -> list[Fraction]:
    """All reduced ``p/q`` with ``0 <= p <= q <= n``, ascending."""
    if n < 1:
        raise ValueError("order must be >= 1")
    return sorted({Fraction(p, q) for q in range(1, n + 1) for p in range(q + 1)})


def farey_point(f: Fraction) -> complex:
    """``exp(2 pi i f)`` with exact values at quarter turns."""
    quarter = {Fraction(0): 1, Fraction(1, 4): 1j, Fraction(1, 2): -1, Fraction(3, 4): -1j, Fraction(1): 1}
    if f in quarter:
        return complex(quarter[f])
    return complex(np.exp(2j * np.pi * float(f)))


@dataclass(frozen=True)
class ItoArc:
    """Arc of ``Theta_n`` between ``exp(2 pi i p/q)`` and ``exp(2 pi i r/s)``, ``q <= s``."""

    n: int
    endpoint_pq: Fraction
    endpoint_rs: Fraction
    arc_type: str
    floor_nq: int

    @property
    def q(self) -> int:
        return self.endpoint_pq.denominator

    @property
    def s(self) -> int:
        return self.endpoint_rs.denominator

    @property
    def start(self) -> complex:
        """Endpoint reached at ``alpha = 0``."""
        return farey_point(self.endpoint_pq)

    @property
    def end(self) -> complex:
        """Endpoint reached at ``alpha = 1``."""
        return farey_point(self.endpoint_rs)


def classify_arc(n: int, a, b) -> ItoArc:
    """Type of the arc joining Farey neighbours ``a`` and ``b`` of order ``n``.

    Type 0: ``floor(n/q) == n``; Type I: ``floor(n/q) == 1``; otherwise
    Type II when ``s < q floor(n/q)`` and Type III when ``s > q floor(n/q)``.
    """
    a, b = Fraction(a), Fraction(b)
    fr = farey_fractions(n)
    if n < 2 or a not in fr or b not in fr:
        raise InvalidEndpoints(f"{a}, {b} are not Farey fractions of order {n} (n >= 2)")
    i, j = sorted((fr.index(a), fr.index(b)))
    if j - i != 1:
        raise InvalidEndpoints(f"{a} and {b} are not adjacent in the Farey sequence of order {n}")
    pq, rs = (a, b) if a.denominator <= b.denominator else (b, a)
    q, s = pq.denominator, rs.denominator
    m = n // q
    if m == n:
        kind = "0"
    elif m == 1:
        kind = "I"
    elif s == q * m:
        raise InvalidEndpoints("s == q floor(n/q) cannot occur for Farey neighbours")
    else:
        kind = "II" if s < q * m else "III"
    return ItoArc(n, pq, rs, kind, m)


def karpelevic_arcs(n: int) -> list[ItoArc]:
    """Arcs between consecutive Farey fractions, in counterclockwise order."""
    fr = farey_fractions(n)
    return [classify_arc(n, a, b) for a, b in zip(fr, fr[1:])]


# ---------------------------------------------------------------------------
# Ito polynomials


def _monomial(k):
    c = np.zeros(k + 1)
    c[k] = 1.0
    return c


@dataclass(frozen=True)
class ItoPolynomial:
    """Reduced Ito polynomial; ``coeffs`` in ascending degree, monic."""

    arc: ItoArc
    alpha: float
    beta: float
    coeffs: np.ndarray

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, t):
        return P.polyval(t, self.coeffs)


def _check_alpha(alpha):
    alpha = float(alpha)
    if not 0.0 <= alpha <= 1.0:
        raise AlphaOutOfRange(f"alpha must lie in [0, 1], got {alpha}")
    return alpha


def ito_polynomial(arc: ItoArc, alpha: float) -> ItoPolynomial:
    alpha = _check_alpha(alpha)
    beta = 1.0 - alpha
    q, s, m, n = arc.q, arc.s, arc.floor_nq, arc.n
    base = P.polysub(_monomial(q), [beta])  # t^q - beta
    if arc.arc_type == "0":
        c = P.polysub(P.polypow([-beta, 1.0], n), [alpha ** n])
    elif arc.arc_type == "I":
        c = P.polysub(P.polysub(_monomial(s), beta * _monomial(s - q)), [alpha])
    elif arc.arc_type == "II":
        c = P.polysub(P.polypow(base, m), alpha ** m * _monomial(q * m - s))
    else:
        c = P.polysub(P.polymul(_monomial(s - q * m), P.polypow(base, m)), [alpha ** m])
    c = np.asarray(c, dtype=float)
    return ItoPolynomial(arc, alpha, beta, c)


def full_ito_coeffs(arc: ItoArc, alpha: float) -> np.ndarray:
    """Ascending coefficients of ``t^s (t^q - beta)^m - alpha^m t^(q m)``."""
    alpha = _check_alpha(alpha)
    q, s, m = arc.q, arc.s, arc.floor_nq
    lhs = P.polymul(_monomial(s), P.polypow(P.polysub(_monomial(q), [1.0 - alpha]), m))
    return np.asarray(P.polysub(lhs, alpha ** m * _monomial(q * m)), dtype=float)


def ito_residual(arc: ItoArc, alpha: float, t) -> np.ndarray:
    return np.abs(P.polyval(t, full_ito_coeffs(arc, alpha)))


# ---------------------------------------------------------------------------
# simultaneous root finding


@dataclass(frozen=True)
class RootSet:
    roots: np.ndarray
    clustered: np.ndarray
    sweeps: int

    @property
    def has_multiple(self) -> bool:
        return bool(self.clustered.any())

    def min_distance(self) -> float:
        r = self.roots
        if len(r) < 2:
            return math.inf
        d = np.abs(r[:, None] - r[None, :])
        d[np.diag_indices(len(r))] = np.inf
        return float(d.min())


def _coefficients(p):
    return np.asarray(p.coeffs if isinstance(p, ItoPolynomial) else p, dtype=complex)


def _eval_scale(c, z):
    return P.polyval(np.abs(z), np.abs(c))


def roots(p, tol: Tolerance = DEFAULT_TOL, max_sweeps: int = MAX_SWEEPS) -> RootSet:
    """All roots at once by Aberth-Ehrlich iteration, then Newton polish.

    Accepts an :class:`ItoPolynomial` or ascending coefficients. Roots closer
    than 1e-7 to another root are flagged as a cluster.
    """
    if isinstance(p, ItoPolynomial) and p.arc.arc_type == "0":
        # (t - beta)^n - alpha^n: solve in u = t - beta, where the cluster
        # around beta is well separated
        n = p.arc.n
        shifted = roots(np.r_[-(p.alpha ** n), np.zeros(n - 1), 1.0], tol, max_sweeps)
        r = shifted.roots + p.beta
        return RootSet(r, _cluster_flags(r), shifted.sweeps)
    c = _coefficients(p)
    c = np.trim_zeros(c, "b")
    if len(c) < 2:
        raise ValueError("polynomial must have degree >= 1")
    zeros = 0
    while c[0] == 0:
        c = c[1:]
        zeros += 1
    a = c / c[-1]
    d = len(a) - 1
    found = np.zeros(0, dtype=complex)
    sweeps = 0
    if d > 0:
        found, sweeps = _aberth(a, tol, max_sweeps)
    r = np.concatenate([np.zeros(zeros, dtype=complex), found])
    return RootSet(r, _cluster_flags(r), sweeps)


def _cluster_flags(r):
    if len(r) < 2:
        return np.zeros(len(r), bool)
    dist = np.abs(r[:, None] - r[None, :])
    dist[np.diag_indices(len(r))] = np.inf
    return dist.min(axis=1) < CLUSTER_DISTANCE


def _aberth(a, tol, max_sweeps):
    d = len(a) - 1
    da = P.polyder(a)
    bound = 2 * max(abs(a[d - k]) ** (1.0 / k) for k in range(1, d + 1))
    radius = max(1.0, bound)
    z = radius * np.exp(1j * (2 * np.pi * np.arange(d) / d + 0.4 * math.sqrt(2)))
    for sweep in range(1, max_sweeps + 1):
        pz = P.polyval(z, a)
        dpz = P.polyval(z, da)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = pz / dpz
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, np.inf)
            corr = ratio / (1 - ratio * np.sum(1.0 / diff, axis=1))
        corr = np.where(np.isfinite(corr), corr, 0.0)
        corr = np.where(pz == 0, 0.0, corr)
        z = z - corr
        converged = np.max(np.abs(corr) / np.maximum(1.0, np.abs(z))) <= 4 * np.finfo(float).eps
        if converged or sweep % 8 == 0:
            z = _newton_polish(z, a, da)
            res = np.abs(P.polyval(z, a))
            if np.all(res <= tol.eps_root * _eval_scale(a, z)):
                return z, sweep
    raise NoConvergence(f"root finder did not converge in {max_sweeps} sweeps")


def _newton_polish(z, a, da, steps=3):
    z = z.copy()
    res = np.abs(P.polyval(z, a))
    for _ in range(steps):
        dpz = P.polyval(z, da)
        with np.errstate(divide="ignore", invalid="ignore"):
            cand = z - P.polyval(z, a) / dpz
        cand_res = np.abs(P.polyval(cand, a))
        better = np.isfinite(cand) & (cand_res < res)
        z = np.where(better, cand, z)
        res = np.where(better, cand_res, res)
    return z


# ---------------------------------------------------------------------------
# multiple roots


def sylvester_matrix(f, g) -> np.ndarray:
    """Sylvester matrix of two polynomials given in ascending coefficients."""
    f = np.trim_zeros(np.asarray(f, dtype=complex), "b")[::-1]
    g = np.trim_zeros(np.asarray(g, dtype=complex), "b")[::-1]
    m, n = len(f) - 1, len(g) - 1
    S = np.zeros((m + n, m + n), dtype=complex)
    for i in range(n):
        S[i, i:i + m + 1] = f
    for i in range(m):
        S[n + i, i:i + n + 1] = g
    return S


def resultant(f, g) -> complex:
    return determinant(sylvester_matrix(f, g))


def discriminant_ratio(p) -> float:
    """``|R(p, p')|`` divided by the Hadamard bound of the Sylvester matrix."""
    c = np.trim_zeros(_coefficients(p), "b")
    if len(c) <= 2:
        return 1.0
    S = sylvester_matrix(c, P.polyder(c))
    bound = float(np.prod(np.linalg.norm(S, axis=1)))
    return abs(determinant(S)) / bound


def polyalpha_discriminant(n: int, alpha: float) -> float:
    """``n^n alpha^(n-1) - (n-1)^(n-1) beta^n`` for ``t^n - beta t - alpha``."""
    beta = 1.0 - alpha
    return n ** n * alpha ** (n - 1) - (n - 1) ** (n - 1) * beta ** n


def has_multiple_root(p, closed_form: bool = True) -> bool:
    """Decide whether ``p`` has a repeated root via the resultant ``R(p, p')``.

    Polynomials ``t^n - beta t - alpha`` with ``n >= 4`` and Type 0
    polynomials take a closed-form shortcut unless ``closed_form`` is False.

    The resultant is compared with the Hadamard bound of the Sylvester
    matrix; the cutoff matches a root separation of about 1e-6 for the Type I
    family up to degree 7. Polynomials whose distinct roots sit in a tight
    cluster (Types 0, II, III at small ``alpha``) have tiny resultants and are
    reported as multiple on this path.
    """
    if closed_form and isinstance(p, ItoPolynomial):
        arc = p.arc
        if arc.arc_type == "0":
            return p.alpha == 0.0
        if arc.arc_type == "I" and arc.s - arc.q == 1 and arc.s >= 4:
            n, alpha, beta = arc.s, p.alpha, p.beta
            if n % 2 == 0 or alpha >= beta:
                return False
            a, b = n ** n * alpha ** (n - 1), (n - 1) ** (n - 1) * beta ** n
            return abs(a - b) <= CLOSED_FORM_RTOL * (a + b)
    return discriminant_ratio(p) <= RESULTANT_RTOL


def critical_alpha(n: int, atol: float = 1e-12) -> float:
    """The unique ``alpha`` in ``[0, 1/2]`` where ``t^n - beta t - alpha`` (odd n)
    has a repeated root, found by bisection on the closed-form discriminant."""
    if n % 2 == 0 or n < 3:
        raise ValueError("a critical alpha exists only for odd n >= 3")
    lo, hi = 0.0, 0.5
    g = lambda a: polyalpha_discriminant(n, a)  # noqa: E731
    if g(lo) > 0 or g(hi) < 0:
        raise NoConvergence("discriminant does not change sign on [0, 1/2]")
    mid = 0.5 * (lo + hi)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        val = g(mid)
        if abs(val) <= atol or hi - lo <= np.finfo(float).eps:
            break
        if val < 0:
            lo = mid
        else:
            hi = mid
    return mid


# ---------------------------------------------------------------------------
# realizing matrices and Vandermonde similarities


def type1_companion(arc: ItoArc, alpha: float) -> np.ndarray:
    """Nonnegative companion matrix ``[[0, I], [alpha, beta e_{s-q}^T]]``."""
    if arc.arc_type != "I":
        raise WrongArcType(f"companion realizer needs a Type I arc, got Type {arc.arc_type}")
    alpha = _check_alpha(alpha)
    s, q = arc.s, arc.q
    M = np.zeros((s, s))
    M[np.arange(s - 1), np.arange(1, s)] = 1.0
    M[s - 1, 0] += alpha
    M[s - 1, s - q] += 1.0 - alpha
    return M


def type0_circulant(n: int, alpha: float) -> np.ndarray:
    """Stochastic circulant ``circ(beta, alpha, 0, ..., 0)``."""
    alpha = _check_alpha(alpha)
    if n < 2:
        raise ValueError("order must be >= 2")
    c = np.zeros(n)
    c[0] += 1.0 - alpha
    c[1] += alpha
    return circulant(c).real


def order_roots(values, imag_tol: float = 1e-10) -> np.ndarray:
    """Root 1 first, then real roots ascending, then conjugate pairs
    (positive imaginary part first). Near-real roots are snapped to the real
    axis and pair partners are made exact conjugates."""
    r = as_vector(values).copy()
    one = int(np.argmin(np.abs(r - 1)))
    if abs(r[one] - 1) > 1e-8:
        raise ValueError("root list does not contain 1")
    rest = np.delete(r, one)
    real = np.sort(rest[np.abs(rest.imag) <= imag_tol].real)
    upper = rest[rest.imag > imag_tol]
    lower = list(rest[rest.imag < -imag_tol])
    upper = upper[np.lexsort((upper.imag, upper.real))]
    pairs = []
    for z in upper:
        if not lower:
            raise ValueError("nonreal roots do not come in conjugate pairs")
        j = int(np.argmin([abs(w - np.conj(z)) for w in lower]))
        lower.pop(j)
        pairs += [z, np.conj(z)]
    if lower:
        raise ValueError("nonreal roots do not come in conjugate pairs")
    return np.concatenate([[1.0 + 0j], real.astype(complex), np.array(pairs, dtype=complex)])


def vandermonde_similarity(values, tol: Tolerance = DEFAULT_TOL) -> PerronSimilarity:
    """``S_ij = lambda_j^(i-1)`` for distinct roots ``lambda`` listed with 1 first."""
    lam = as_vector(values, "roots")
    if abs(lam[0] - 1) > 1e-8:
        raise ValueError("the first root must be 1")
    d = np.abs(lam[:, None] - lam[None, :])
    d[np.diag_indices(len(lam))] = np.inf
    if len(lam) > 1 and d.min() <= CLUSTER_DISTANCE:
        raise MultipleRoots(f"roots are not distinct (min distance {d.min():.2e})")
    lam = lam.copy()
    lam[0] = 1.0
    S = lam[None, :] ** np.arange(len(lam))[:, None]
    return PerronSimilarity(S, tol=tol)


def type1_similarity(arc: ItoArc, alpha: float, tol: Tolerance = DEFAULT_TOL):
    """Ordered roots and Vandermonde similarity for a Type I arc at ``alpha``."""
    rs = roots(ito_polynomial(arc, alpha), tol)
    if rs.has_multiple:
        raise MultipleRoots(f"Ito polynomial has a repeated root at alpha={alpha}")
    lam = order_roots(rs.roots)
    return lam, vandermonde_similarity(lam, tol)


# ---------------------------------------------------------------------------
# boundary of Theta_n


@dataclass(frozen=True)
class ThetaBoundary:
    """Closed, counterclockwise polyline through the Farey points of order n.

    ``alphas[i]`` and ``arc_index[i]`` record the Ito parameter and the arc
    (index into ``arcs``) that produced ``points[i]``.
    """

    n: int
    points: np.ndarray
    alphas: np.ndarray
    arc_index: np.ndarray
    arcs: tuple

    def segments(self):
        return self.points, np.roll(self.points, -1)


def _track(arc: ItoArc, grid, tol):
    """Follow the root leaving ``arc.end`` as alpha decreases along ``grid``."""
    pts = [arc.end]
    for a0, a1 in zip(grid[:-1], grid[1:]):
        pts.append(_step(arc, a0, a1, pts, tol, depth=0))
    return np.array(pts)


def _factored(arc: ItoArc, alpha: float, t):
    """Value and derivative of the reduced Ito polynomial, evaluated without
    expanding the powers of ``t^q - beta``."""
    beta, q, s, m = 1.0 - alpha, arc.q, arc.s, arc.floor_nq
    if arc.arc_type == "0":
        u = t - beta
        return u ** arc.n - alpha ** arc.n, arc.n * u ** (arc.n - 1)
    if arc.arc_type == "I":
        k = s - q
        return t ** s - beta * t ** k - alpha, s * t ** (s - 1) - beta * k * t ** (k - 1)
    u = t ** q - beta
    du = q * t ** (q - 1)
    if arc.arc_type == "II":
        k = q * m - s
        return u ** m - alpha ** m * t ** k, m * u ** (m - 1) * du - alpha ** m * k * t ** (k - 1)
    k = s - q * m
    return t ** k * u ** m - alpha ** m, k * t ** (k - 1) * u ** m + t ** k * m * u ** (m - 1) * du


def polish_root(arc: ItoArc, alpha: float, t: complex, steps: int = 6) -> complex:
    """Newton steps on the factored polynomial; keeps the best iterate."""
    best, best_res = t, abs(_factored(arc, alpha, t)[0])
    for _ in range(steps):
        f, df = _factored(arc, alpha, t)
        if df == 0 or f == 0:
            break
        t = t - f / df
        res = abs(_factored(arc, alpha, t)[0])
        if not res < best_res:
            break
        best, best_res = t, res
    return best


def _step(arc, a0, a1, pts, tol, depth):
    if a1 == 0.0:
        candidates = np.array([arc.start])
    else:
        candidates = roots(ito_polynomial(arc, a1), tol).roots
        candidates = np.array([polish_root(arc, a1, z) for z in candidates])
    prev = pts[-1]
    pred = prev if len(pts) < 2 or depth else 2 * prev - pts[-2]
    dist = np.abs(candidates - pred)
    near = np.flatnonzero(dist <= 2 * dist.min() + 1e-12)
    j = int(np.argmin(dist))
    jump = abs(candidates[j] - prev)
    if ((len(near) > 1 and jump > 1e-6) or jump > JUMP_THRESHOLD) and depth < MAX_REFINE and a1 != 0.0:
        mid = 0.5 * (a0 + a1)
        sub = list(pts)
        sub.append(_step(arc, a0, mid, sub, tol, depth + 1))
        return _step(arc, mid, a1, sub, tol, depth + 1)
    if len(near) > 1:
        # roots just split apart: the boundary follows the outer one
        j = int(near[np.argmax(np.abs(candidates[near]))])
    if abs(candidates[j] - prev) > JUMP_THRESHOLD:
        raise BranchTrackingFailure(
            f"jump of {abs(candidates[j] - prev):.3f} on arc {arc.endpoint_pq}-{arc.endpoint_rs} at alpha={a1}")
    return candidates[j]


def trace_arc(arc: ItoArc, samples: int = MIN_ARC_STEPS, tol: Tolerance = DEFAULT_TOL):
    """Points of ``arc`` for ``alpha`` on a uniform grid from 1 down to 0."""
    if samples < 2:
        raise ValueError("need at least two samples per arc")
    refine = max(1, math.ceil(MIN_ARC_STEPS / (samples - 1)))
    fine = np.linspace(1.0, 0.0, (samples - 1) * refine + 1)
    pts = _track(arc, fine, tol)
    pts[0], pts[-1] = arc.end, arc.start
    return fine[::refine], pts[::refine]


def theta_boundary(n: int, samples_per_arc: int = MIN_ARC_STEPS, tol: Tolerance = DEFAULT_TOL) -> ThetaBoundary:
    """Trace every arc of the upper half and mirror it to close the curve."""
    if n < 2:
        raise ValueError("order must be >= 2")
    arcs = karpelevic_arcs(n)
    upper = [arc for arc in arcs if max(arc.endpoint_pq, arc.endpoint_rs) <= Fraction(1, 2)]
    pts, alphas, idx = [], [], []
    traced = []
    for arc in upper:
        al, z = trace_arc(arc, samples_per_arc, tol)
        # traced from r/s to p/q; orient counterclockwise
        if arc.endpoint_pq < arc.endpoint_rs:
            al, z = al[::-1], z[::-1]
        traced.append((al, z))
        k = arcs.index(arc)
        pts.append(z[:-1])
        alphas.append(al[:-1])
        idx.append(np.full(len(z) - 1, k))
    for arc, (al, z) in zip(reversed(upper), reversed(traced)):
        mirror = classify_arc(n, 1 - arc.endpoint_rs, 1 - arc.endpoint_pq)
        k = arcs.index(mirror)
        zc, alc = np.conj(z[::-1]), al[::-1]
        pts.append(zc[:-1])
        alphas.append(alc[:-1])
        idx.append(np.full(len(z) - 1, k))
    return ThetaBoundary(n, np.concatenate(pts), np.concatenate(alphas), np.concatenate(idx), tuple(arcs))


def _segment_distance(z, a, b):
    ab = b - a
    denom = np.abs(ab) ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(denom > 0, ((z[:, None] - a[None, :]) * np.conj(ab)[None, :]).real / denom, 0.0)
    t = np.clip(t, 0.0, 1.0)
    return np.abs(z[:, None] - (a[None, :] + t * ab[None, :])).min(axis=1)


def theta_contains(lam, boundary: ThetaBoundary, tol: float = 1e-9, chunk: int = 4096):
    """Even-odd test against the boundary polyline; points within ``tol`` of
    the polyline count as inside. Accepts a scalar or an array."""
    z = np.atleast_1d(np.asarray(lam, dtype=complex)).ravel()
    a, b = boundary.segments()
    out = np.zeros(len(z), bool)
    for lo in range(0, len(z), chunk):
        zz = z[lo:lo + chunk]
        x, y = zz.real[:, None], zz.imag[:, None]
        ya, yb = a.imag[None, :], b.imag[None, :]
        xa, xb = a.real[None, :], b.real[None, :]
        crosses = (ya > y) != (yb > y)
        with np.errstate(divide="ignore", invalid="ignore"):
            xint = xa + (y - ya) * (xb - xa) / (yb - ya)
        inside = np.sum(crosses & (x < xint), axis=1) % 2 == 1
        out[lo:lo + chunk] = inside | (_segment_distance(zz, a, b) <= tol)
    if np.ndim(lam) == 0:
        return bool(out[0])
    return out.reshape(np.shape(lam))


def is_extremal_in_theta(lam, boundary: ThetaBoundary, tol: float = 1e-9) -> bool:
    """``lam`` is extremal when ``(1 + 10 tol) lam`` leaves ``Theta_n``.

    Zero is reported as non-extremal by convention.
    """
    lam = complex(lam)
    if not theta_contains(lam, boundary, tol):
        raise NotInRegion(f"{lam} is not in Theta_{boundary.n}")
    if abs(lam) <= tol:
        return False
    return not theta_contains((1 + 10 * tol) * lam, boundary, tol)


def is_extremal_similarity(S, boundary: ThetaBoundary | None = None, tol: float = 1e-6) -> bool:
    """Sufficient test: some row other than ``e`` lies in the spectratope and
    has an entry (past the first) that is extremal in ``Theta_n``.

    A False answer is inconclusive.
    """
    S = as_similarity(S)
    if S.n < 2:
        return False
    boundary = boundary or theta_boundary(S.n, 256)
    for row in S.S:
        if np.allclose(row, 1.0) or not in_spectratope(S, row):
            continue
        for value in row[1:]:
            if theta_contains(value, boundary, tol) and is_extremal_in_theta(value, boundary, tol):
                return True
    return False
