"""Spectracones, spectratopes and Perron similarities.

For an invertible ``S`` and a candidate spectrum ``x`` the realizing matrix is
``M_x = S diag(x) S^{-1}``. ``x`` lies in the spectracone of ``S`` when ``M_x``
is entrywise nonnegative and in the spectratope when ``M_x`` is in addition
row stochastic. Every membership question here reduces to that matrix, or to
the row-cone coefficients ``y = S^{-T} x``.

Indices are 0-based throughout.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .exceptions import (
    DimensionMismatch,
    InvalidScaling,
    NotAnEigenvector,
    NotPerronSimilarity,
    NotStochastic,
)
from .numerics import (
    DEFAULT_TOL,
    IllConditionedWarning,
    Tolerance,
    as_matrix,
    as_vector,
    infnorm,
    inverse,
    is_nonneg,
    is_stochastic,
)

CONDITION_WARNING = 1e8
PAIRING_TOL = 1e-8


@dataclass(frozen=True)
class SpectrumVector:
    """A list of eigenvalues with a designated Perron entry.

    ``perron_index`` is the smallest index whose modulus is maximal.
    """

    x: np.ndarray
    perron_index: int

    @classmethod
    def from_values(cls, values) -> "SpectrumVector":
        x = as_vector(values, "spectrum")
        x.setflags(write=False)
        return cls(x, perron_index(x))

    def canonical(self) -> "SpectrumVector":
        """Move the Perron entry to the front, keeping the others in order."""
        k = self.perron_index
        order = [k] + [i for i in range(len(self.x)) if i != k]
        return SpectrumVector.from_values(self.x[order])

    def normalized(self) -> "SpectrumVector":
        """Canonical form scaled so that the Perron entry equals 1."""
        c = self.canonical()
        rho = c.x[0]
        if rho == 0:
            return c
        return SpectrumVector.from_values(c.x / rho)

    def __len__(self):
        return len(self.x)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.x, dtype=dtype)


def perron_index(x) -> int:
    x = as_vector(x)
    mod = np.abs(x)
    rho = mod.max()
    return int(np.flatnonzero(mod >= rho * (1 - 1e-12))[0])


class PerronSimilarity:
    """An invertible matrix with its cached inverse.

    Any invertible matrix is accepted; ``normalized`` records whether the
    matrix is in normal form (first column ``e``, other columns of unit
    infinity norm, real columns before nonreal ones, nonreal columns in
    adjacent conjugate pairs). Use :func:`normalize` to reach that form.
    """

    def __init__(self, S, S_inv=None, tol: Tolerance = DEFAULT_TOL):
        S = as_matrix(S, "similarity")
        if S.shape[0] != S.shape[1]:
            raise DimensionMismatch(f"similarity must be square, got {S.shape}")
        S_inv = inverse(S, tol) if S_inv is None else as_matrix(S_inv, "inverse")
        if S_inv.shape != S.shape:
            raise DimensionMismatch("inverse has the wrong shape")
        self.condition = infnorm(S) * infnorm(S_inv)
        if self.condition > CONDITION_WARNING:
            warnings.warn(f"similarity condition estimate {self.condition:.2e}",
                          IllConditionedWarning, stacklevel=2)
        residual = infnorm(S @ S_inv - np.eye(len(S)))
        if residual > max(tol.eps_eq, 1e-12 * self.condition):
            warnings.warn(f"||S S^-1 - I|| = {residual:.2e}", IllConditionedWarning, stacklevel=2)
        S.setflags(write=False)
        S_inv.setflags(write=False)
        self.S = S
        self.S_inv = S_inv
        self.normalized = is_normalized(S)

    @property
    def n(self) -> int:
        return self.S.shape[0]

    @property
    def rows(self) -> np.ndarray:
        return self.S

    def __repr__(self):
        return f"PerronSimilarity(n={self.n}, normalized={self.normalized})"


def as_similarity(S, tol: Tolerance = DEFAULT_TOL) -> PerronSimilarity:
    return S if isinstance(S, PerronSimilarity) else PerronSimilarity(S, tol=tol)


def _spectrum(S: PerronSimilarity, x) -> np.ndarray:
    x = as_vector(x, "spectrum")
    if len(x) != S.n:
        raise DimensionMismatch(f"spectrum has length {len(x)}, similarity has order {S.n}")
    return x


def is_normalized(S, atol: float = PAIRING_TOL) -> bool:
    S = np.asarray(S, dtype=complex)
    n = S.shape[0]
    if not np.allclose(S[:, 0], 1.0, rtol=0, atol=atol):
        return False
    if n > 1 and not np.allclose(np.max(np.abs(S[:, 1:]), axis=0), 1.0, rtol=0, atol=atol):
        return False
    real = np.max(np.abs(S.imag), axis=0) <= atol
    j = 1
    while j < n and real[j]:
        j += 1
    while j < n:
        if real[j] or j + 1 >= n or real[j + 1]:
            return False
        if np.max(np.abs(S[:, j] - np.conj(S[:, j + 1]))) > atol:
            return False
        j += 2
    return True


# ---------------------------------------------------------------------------
# membership


def realizing_matrix(S, x) -> np.ndarray:
    """``M_x = S diag(x) S^{-1}``."""
    S = as_similarity(S)
    x = _spectrum(S, x)
    return (S.S * x) @ S.S_inv


def in_spectracone(S, x, tol: Tolerance = DEFAULT_TOL) -> bool:
    return is_nonneg(realizing_matrix(S, x), tol)


def in_spectratope(S, x, tol: Tolerance = DEFAULT_TOL) -> bool:
    return is_stochastic(realizing_matrix(S, x), tol)


def row_cone_coefficients(S, x) -> np.ndarray:
    """Coefficients ``y`` with ``x^T = y^T S``."""
    S = as_similarity(S)
    return S.S_inv.T @ _spectrum(S, x)


def in_row_cone(S, x, tol: Tolerance = DEFAULT_TOL) -> bool:
    return is_nonneg(row_cone_coefficients(S, x), tol)


def in_row_polytope(S, x, tol: Tolerance = DEFAULT_TOL) -> bool:
    y = row_cone_coefficients(S, x)
    return is_nonneg(y, tol) and abs(y.sum() - 1.0) <= tol.eps_eq


def is_ideal(S, tol: Tolerance = DEFAULT_TOL) -> bool:
    """Ideal iff ``e`` is in the row cone and every row is in the spectracone."""
    S = as_similarity(S, tol)
    if not in_row_cone(S, np.ones(S.n), tol):
        return False
    return all(in_spectracone(S, row, tol) for row in S.S)


# ---------------------------------------------------------------------------
# Perron similarity recognition and normal form


def _phase_aligned(v, tol: Tolerance):
    """Return ``(phase, u)`` with ``v = phase * u`` and ``u`` real positive, else None."""
    j = int(np.argmax(np.abs(v)))
    if abs(v[j]) == 0:
        return None
    phase = v[0] / abs(v[0]) if v[0] != 0 else v[j] / abs(v[j])
    u = v / phase
    scale = np.max(np.abs(u))
    if np.max(np.abs(u.imag)) > tol.eps_eq * scale or np.min(u.real) <= tol.eps_nonneg * scale:
        return None
    return phase, u.real


def is_perron_similarity(S, tol: Tolerance = DEFAULT_TOL):
    """Index ``k`` such that column ``k`` of ``S`` and row ``k`` of ``S^{-1}``
    are nonzero multiples ``a x``, ``b y`` of positive vectors with ``a b > 0``.

    Returns ``None`` when no such index exists.
    """
    S = as_similarity(S, tol)
    for k in range(S.n):
        col = _phase_aligned(S.S[:, k], tol)
        if col is None:
            continue
        row = _phase_aligned(S.S_inv[k, :], tol)
        if row is None:
            continue
        ab = col[0] * row[0]
        if abs(ab.imag) <= 1e-8 and ab.real > 0:
            return k
    return None


def _perm_matrix(perm) -> np.ndarray:
    perm = np.asarray(perm)
    if perm.ndim == 2:
        return perm.astype(complex)
    return np.eye(len(perm), dtype=complex)[perm]


def _as_perm(P, n) -> np.ndarray:
    """Accept a permutation vector or matrix; return the vector form."""
    if P is None:
        return np.arange(n)
    P = np.asarray(P)
    if P.ndim == 2:
        binary = np.isin(P, (0, 1)).all()
        if P.shape != (n, n) or not binary or not (P.sum(0) == 1).all() or not (P.sum(1) == 1).all():
            raise InvalidScaling("not a permutation matrix")
        return np.argmax(np.abs(P), axis=1)
    perm = P.astype(int)
    if sorted(perm.tolist()) != list(range(n)):
        raise InvalidScaling(f"not a permutation of range({n}): {perm.tolist()}")
    return perm


@dataclass(frozen=True)
class EquivalenceTransform:
    """``S = P_sigma D_v T D_w Q_gamma`` with ``v > 0`` and ``w`` totally nonzero.

    ``sigma``/``gamma`` are permutation vectors: ``P_sigma = I[sigma]``.
    """

    sigma: np.ndarray
    v: np.ndarray
    w: np.ndarray
    gamma: np.ndarray

    @classmethod
    def identity(cls, n):
        return cls(np.arange(n), np.ones(n), np.ones(n, dtype=complex), np.arange(n))

    @property
    def P(self):
        return _perm_matrix(self.sigma)

    @property
    def Q(self):
        return _perm_matrix(self.gamma)

    def apply(self, T) -> np.ndarray:
        return equivalence_transform(T, self.sigma, self.v, self.w, self.gamma)

    def compose(self, inner: "EquivalenceTransform") -> "EquivalenceTransform":
        """Single transform for ``S = self(inner(U))``."""
        # P D_v P' = P P' D_{P'^T v};  D_w' Q' D_w Q = D_{w' * (Q' w)} Q' Q
        P_inner = inner.P
        Q_inner = inner.Q
        sigma = np.argmax(np.abs(self.P @ P_inner), axis=1)
        gamma = np.argmax(np.abs(Q_inner @ self.Q), axis=1)
        v = (P_inner.T.real @ self.v) * inner.v
        w = inner.w * (Q_inner @ self.w)
        return EquivalenceTransform(sigma, v, w, gamma)

    def inverse(self) -> "EquivalenceTransform":
        """Transform with ``T = inverse.apply(S)``."""
        P, Q = self.P, self.Q
        sigma = np.argsort(self.sigma)
        gamma = np.argsort(self.gamma)
        # T = P^T D_{P v^-1} S D_{Q^T w^-1} Q^T
        v = P.real @ (1.0 / self.v)
        w = Q.T @ (1.0 / self.w)
        return EquivalenceTransform(sigma, v, w, gamma)

    def is_identity(self, atol=1e-12) -> bool:
        n = len(self.v)
        return (np.array_equal(self.sigma, np.arange(n)) and np.array_equal(self.gamma, np.arange(n))
                and np.allclose(self.v, 1, atol=atol) and np.allclose(self.w, 1, atol=atol))


def equivalence_transform(S, P_sigma=None, v=None, w=None, Q_gamma=None) -> np.ndarray:
    """Return ``P D_v S D_w Q``.

    Permutations may be given as index vectors or as permutation matrices.
    """
    S = as_matrix(S.S if isinstance(S, PerronSimilarity) else S)
    n = S.shape[0]
    sigma, gamma = _as_perm(P_sigma, n), _as_perm(Q_gamma, n)
    v = np.ones(n) if v is None else np.asarray(v)
    w = np.ones(n) if w is None else as_vector(w)
    if v.shape != (n,) or w.shape != (n,):
        raise DimensionMismatch("scaling vectors must match the matrix order")
    if np.iscomplexobj(v) and np.any(v.imag != 0):
        raise InvalidScaling("v must be real and positive")
    v = v.real.astype(float)
    if np.any(v <= 0):
        raise InvalidScaling("v must be strictly positive")
    if np.any(w == 0):
        raise InvalidScaling("w must be totally nonzero")
    scaled = (v[:, None] * S) * w[None, :]
    # (P X)[i] = X[sigma[i]];  (X Q)[:, gamma[j]] = X[:, j]
    out = np.empty_like(scaled)
    out[:, gamma] = scaled[sigma]
    return out


@dataclass(frozen=True)
class Normalization:
    similarity: PerronSimilarity
    transform: EquivalenceTransform
    perron_index: int


def _column_phase_scale(c):
    mod = np.abs(c)
    top = mod.max()
    j = int(np.flatnonzero(mod >= top * (1 - 1e-9))[0])
    return c[j] / mod[j] * top


def normalize(S, tol: Tolerance = DEFAULT_TOL) -> Normalization:
    """Bring a Perron similarity to normal form.

    Returns the normalized similarity ``T`` and the transform with
    ``S = P D_v T D_w Q``.
    """
    S = as_similarity(S, tol)
    n = S.n
    k = is_perron_similarity(S, tol)
    if k is None:
        raise NotPerronSimilarity("no column/row pair is a positive Perron pair")
    if S.normalized:
        return Normalization(S, EquivalenceTransform.identity(n), k)

    phase, x = _phase_aligned(S.S[:, k], tol)
    S1 = S.S / x[:, None]

    scales = np.array([_column_phase_scale(S1[:, j]) for j in range(n)])
    scales[k] = phase
    cols = S1 / scales[None, :]
    cols[:, k] = 1.0

    others = [j for j in range(n) if j != k]
    real_cols = [j for j in others if np.max(np.abs(cols[:, j].imag)) <= PAIRING_TOL]
    for j in real_cols:
        cols[:, j] = cols[:, j].real
    nonreal = [j for j in others if j not in real_cols]
    order = [k] + real_cols
    free = list(nonreal)
    while free:
        i = free.pop(0)
        dist = [np.max(np.abs(cols[:, i] - np.conj(cols[:, j]))) for j in free]
        if not dist or min(dist) > PAIRING_TOL:
            raise NotPerronSimilarity(f"column {i} has no conjugate partner")
        j = free.pop(int(np.argmin(dist)))
        cols[:, j] = np.conj(cols[:, i])
        order += [i, j]

    T = cols[:, order]
    transform = EquivalenceTransform(np.arange(n), x, scales[order], np.array(order))
    return Normalization(PerronSimilarity(T, tol=tol), transform, k)


# ---------------------------------------------------------------------------
# half-space description


@dataclass(frozen=True)
class HalfSpace:
    """``{x : Re <x, a> >= b}`` with ``<x, a> = a^* x``."""

    a: np.ndarray
    b: float = 0.0

    def value(self, x) -> float:
        return float(np.vdot(self.a, x).real)

    def contains(self, x, eps: float = 0.0) -> bool:
        return self.value(x) >= self.b - eps


@dataclass(frozen=True)
class HalfSpaceDescription:
    cone: list = field(default_factory=list)
    tope: list = field(default_factory=list)

    def _check(self, spaces, x, eps):
        A = np.array([h.a for h in spaces])
        b = np.array([h.b for h in spaces])
        return bool(np.all((np.conj(A) @ as_vector(x)).real >= b - eps))

    def cone_contains(self, x, tol: Tolerance = DEFAULT_TOL) -> bool:
        return self._check(self.cone, x, tol.eps_nonneg)

    def tope_contains(self, x, tol: Tolerance = DEFAULT_TOL) -> bool:
        if not self.cone_contains(x, tol):
            return False
        # rows come in groups of four: Re >= 1, -Re >= -1, Im >= 0, -Im >= 0
        return self._check(self.tope, x, tol.eps_eq)


def halfspace_description(S) -> HalfSpaceDescription:
    """Half-spaces cutting out the spectracone (3 n^2) and spectratope (+4 n)."""
    S = as_similarity(S)
    cone = []
    for i in range(S.n):
        for j in range(S.n):
            a = np.conj(S.S[i] * S.S_inv[:, j])
            cone += [HalfSpace(a), HalfSpace(1j * a), HalfSpace(-1j * a)]
    Te = S.S_inv.sum(axis=1)
    tope = []
    for i in range(S.n):
        a = np.conj(S.S[i] * Te)
        tope += [HalfSpace(a, 1.0), HalfSpace(-a, -1.0), HalfSpace(1j * a), HalfSpace(-1j * a)]
    return HalfSpaceDescription(cone, tope)


# ---------------------------------------------------------------------------
# necessary conditions


@dataclass
class ConditionReport:
    spectral_radius_ok: bool
    self_conjugate_ok: bool
    moments_ok: bool
    jll_ok: bool
    newton_ok: bool
    horizon: int
    witnesses: dict
    first_violation: dict | None

    @property
    def ok(self) -> bool:
        return self.first_violation is None

    def to_dict(self) -> dict:
        return {
            "spectral_radius_ok": self.spectral_radius_ok,
            "self_conjugate_ok": self.self_conjugate_ok,
            "moments_ok": self.moments_ok,
            "jll_ok": self.jll_ok,
            "newton_ok": self.newton_ok,
            "horizon": self.horizon,
            "witnesses": self.witnesses,
            "first_violation": self.first_violation,
        }


def _conjugate_unmatched(x, atol):
    free = np.ones(len(x), bool)
    for i, value in enumerate(x):
        target = np.conj(value)
        if free[i] and abs(value - target) <= atol:
            free[i] = False
            continue
        d = np.where(free, np.abs(x - target), np.inf)
        j = int(np.argmin(d))
        if d[j] > atol:
            return i
        free[j] = False
    return None


def check_necessary_conditions(x, horizon: int = 8, tol: Tolerance = DEFAULT_TOL) -> ConditionReport:
    """Spectral radius, self-conjugacy, trace moments, JLL and Newton checks.

    Moments are checked for ``k <= horizon`` and JLL for ``k * l <= horizon``.
    Newton's inequalities are applied to the normalized elementary symmetric
    means of ``{0, rho - x_2, ..., rho - x_n}``.
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    x = as_vector(x, "spectrum")
    n = len(x)
    spec = SpectrumVector.from_values(x)
    rho = float(np.abs(x).max())
    eps = tol.eps_eq
    witnesses = {}

    dist = np.abs(x - rho)
    radius_ok = bool(dist.min() <= eps * max(1.0, rho))
    witnesses["spectral_radius"] = {"rho": rho, "index": int(np.argmin(dist)) if radius_ok else spec.perron_index}

    bad = _conjugate_unmatched(x, eps * max(1.0, rho))
    conj_ok = bad is None
    witnesses["self_conjugate"] = None if conj_ok else {"index": bad}

    moments = {}
    moment_fail = None
    for k in range(1, horizon + 1):
        pk = x ** k
        s = pk.sum()
        scale = max(1.0, float(np.abs(pk).sum()))
        moments[k] = s
        if moment_fail is None and (abs(s.imag) > eps * scale or s.real < -eps * scale):
            moment_fail = k
    moments_ok = moment_fail is None
    witnesses["moments"] = None if moments_ok else {"k": moment_fail, "value": complex(moments[moment_fail])}

    jll_fail = None
    for k in range(1, horizon + 1):
        for ell in range(2, horizon // k + 1):
            lhs = moments[k].real ** ell
            rhs = n ** (ell - 1) * moments[k * ell].real
            scale = max(1.0, abs(lhs), n ** (ell - 1) * float(np.sum(np.abs(x) ** (k * ell))))
            if lhs > rhs + eps * scale:
                jll_fail = (k, ell)
                break
        if jll_fail:
            break
    jll_ok = jll_fail is None
    witnesses["jll"] = None if jll_ok else {"k": jll_fail[0], "l": jll_fail[1]}

    newton_fail = None
    if conj_ok:
        lead = x[spec.perron_index]
        shifted = np.concatenate([[0.0], lead - np.delete(x, spec.perron_index)])
        c = np.poly(shifted)
        e = np.array([(-1) ** k * c[k] for k in range(n + 1)]).real
        p = np.array([e[k] / math.comb(n, k) for k in range(n + 1)])
        for k in range(1, n):
            scale = max(1e-300, p[k] ** 2, abs(p[k - 1] * p[k + 1]))
            if p[k] ** 2 < p[k - 1] * p[k + 1] - eps * scale:
                newton_fail = k
                break
        newton_ok = newton_fail is None
        witnesses["newton"] = None if newton_ok else {"k": newton_fail}
    else:
        newton_ok = False
        witnesses["newton"] = {"k": None, "reason": "not self-conjugate"}

    first = None
    for name, ok in (("spectral_radius", radius_ok), ("self_conjugate", conj_ok),
                     ("moments", moments_ok), ("jll", jll_ok), ("newton", newton_ok)):
        if not ok:
            first = {"condition": name, **(witnesses[name] or {})}
            break
    return ConditionReport(radius_ok, conj_ok, moments_ok, jll_ok, newton_ok, horizon, witnesses, first)


# ---------------------------------------------------------------------------
# constructions used by the star-shape arguments


def brauer_perturb(A, x, y, eigenvalue, tol: Tolerance = DEFAULT_TOL):
    """Rank-one update ``A + x y^*`` and the shifted eigenvalue ``lambda + y^* x``.

    ``x`` must be an eigenvector of ``A`` for ``eigenvalue``.
    """
    A = as_matrix(A)
    x, y = as_vector(x, "x"), as_vector(y, "y")
    if len(x) != A.shape[0] or len(y) != A.shape[0]:
        raise DimensionMismatch("vector lengths must match the matrix order")
    scale = max(1.0, infnorm(A)) * max(1.0, infnorm(x))
    if infnorm(A @ x - eigenvalue * x) > tol.eps_eq * scale:
        raise NotAnEigenvector("A x != lambda x")
    return A + np.outer(x, np.conj(y)), eigenvalue + np.vdot(y, x)


def stochastic_blend(A, alpha: float, target: str = "identity", tol: Tolerance = DEFAULT_TOL):
    """``alpha A + (1 - alpha) I`` or ``alpha A + (1 - alpha)/n e e^T``."""
    A = as_matrix(A)
    if not is_stochastic(A, tol):
        raise NotStochastic("blend needs a stochastic matrix")
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    n = A.shape[0]
    if target == "identity":
        return alpha * A + (1 - alpha) * np.eye(n)
    if target == "uniform":
        return alpha * A + (1 - alpha) / n * np.ones((n, n))
    raise ValueError(f"unknown blend target {target!r}")


def blended_spectrum(x, alpha: float, target: str = "identity") -> np.ndarray:
    """Predicted spectrum of :func:`stochastic_blend` for a stochastic spectrum ``x``."""
    x = SpectrumVector.from_values(x).canonical().x
    rest = x[1:]
    if target == "identity":
        rest = alpha * rest + (1 - alpha)
    elif target == "uniform":
        rest = alpha * rest
    else:
        raise ValueError(f"unknown blend target {target!r}")
    return np.concatenate([[1.0], rest])


def angle(x, y) -> float:
    """Angle between complex vectors, pi/2 when either vector is zero."""
    x, y = as_vector(x, "x"), as_vector(y, "y")
    nx, ny = np.linalg.norm(x), np.linalg.norm(y)
    if nx == 0 or ny == 0:
        return math.pi / 2
    c = np.vdot(y, x).real / (nx * ny)
    return float(math.acos(min(1.0, max(-1.0, c))))
