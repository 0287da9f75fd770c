"""Dense complex linear algebra and tolerance-aware predicates.

Matrices and vectors are plain ``numpy`` arrays of dtype ``complex128``;
nothing here mutates its inputs.
"""

from __future__ import annotations

import json
import re
import warnings
from dataclasses import dataclass

import numpy as np

from .exceptions import DimensionMismatch, LengthMismatch, ParseError, SingularMatrix

GROWTH_WARNING = 1e8


class IllConditionedWarning(UserWarning):
    """Raised (as a warning) when a solve is numerically suspect."""


@dataclass(frozen=True)
class Tolerance:
    """Slack parameters shared by every predicate.

    eps_nonneg : entrywise nonnegativity slack (real part and |imag| part)
    eps_eq     : equality slack (row sums, residuals, pivots)
    eps_root   : scale-relative residual target for polynomial roots
    """

    eps_nonneg: float = 1e-9
    eps_eq: float = 1e-9
    eps_root: float = 1e-12

    def __post_init__(self):
        for name in ("eps_nonneg", "eps_eq", "eps_root"):
            value = getattr(self, name)
            if not (value >= 0 and np.isfinite(value)):
                raise ValueError(f"{name} must be a finite nonnegative number, got {value!r}")


DEFAULT_TOL = Tolerance()


def as_matrix(A, name="matrix"):
    """Return ``A`` as a finite 2-D complex array."""
    M = np.array(A, dtype=complex)
    if M.ndim == 0:
        M = M.reshape(1, 1)
    if M.ndim != 2:
        raise DimensionMismatch(f"{name} must be 2-D, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError(f"{name} has non-finite entries")
    return M


def as_vector(x, name="vector"):
    """Return ``x`` as a finite 1-D complex array."""
    v = np.array(x, dtype=complex)
    if v.ndim == 0:
        v = v.reshape(1)
    if v.ndim != 1:
        raise DimensionMismatch(f"{name} must be 1-D, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError(f"{name} has non-finite entries")
    return v


# ---------------------------------------------------------------------------
# LU with partial pivoting


@dataclass(frozen=True)
class LUFactorization:
    lu: np.ndarray
    perm: np.ndarray
    growth: float

    def solve(self, B):
        B = np.asarray(B, dtype=complex)
        vec = B.ndim == 1
        Y = (B.reshape(-1, 1) if vec else B)[self.perm].copy()
        n = self.lu.shape[0]
        for k in range(n):
            Y[k + 1:] -= np.outer(self.lu[k + 1:, k], Y[k])
        for k in range(n - 1, -1, -1):
            Y[k] /= self.lu[k, k]
            Y[:k] -= np.outer(self.lu[:k, k], Y[k])
        return Y.ravel() if vec else Y


def lu_factor(A, tol: Tolerance = DEFAULT_TOL) -> LUFactorization:
    """Row-pivoted LU of a square complex matrix.

    Raises :class:`SingularMatrix` when a pivot falls below
    ``tol.eps_eq * max|A|``. The returned ``growth`` is ``max|U| / max|A|``.
    """
    A = as_matrix(A)
    n, m = A.shape
    if n != m:
        raise DimensionMismatch(f"LU needs a square matrix, got {A.shape}")
    scale = float(np.max(np.abs(A))) if A.size else 0.0
    if scale == 0.0:
        raise SingularMatrix("matrix is zero")
    lu = A.copy()
    perm = np.arange(n)
    for k in range(n):
        p = k + int(np.argmax(np.abs(lu[k:, k])))
        if abs(lu[p, k]) <= tol.eps_eq * scale:
            raise SingularMatrix(f"pivot {k} has magnitude {abs(lu[p, k]):.3e}")
        if p != k:
            lu[[k, p]] = lu[[p, k]]
            perm[[k, p]] = perm[[p, k]]
        lu[k + 1:, k] /= lu[k, k]
        lu[k + 1:, k + 1:] -= np.outer(lu[k + 1:, k], lu[k, k + 1:])
    growth = float(np.max(np.abs(np.triu(lu)))) / scale
    return LUFactorization(lu, perm, growth)


def lu_solve(A, B, tol: Tolerance = DEFAULT_TOL, refine: int = 1):
    """Solve ``A X = B`` by pivoted LU plus ``refine`` steps of refinement.

    A growth factor above 1e8 triggers an :class:`IllConditionedWarning`.
    """
    A = as_matrix(A)
    B = np.asarray(B, dtype=complex)
    if B.shape[0] != A.shape[0]:
        raise DimensionMismatch(f"right-hand side has {B.shape[0]} rows, expected {A.shape[0]}")
    fac = lu_factor(A, tol)
    if fac.growth > GROWTH_WARNING:
        warnings.warn(f"LU growth factor {fac.growth:.2e}", IllConditionedWarning, stacklevel=2)
    X = fac.solve(B)
    for _ in range(refine):
        X = X + fac.solve(B - A @ X)
    return X


def inverse(A, tol: Tolerance = DEFAULT_TOL):
    A = as_matrix(A)
    return lu_solve(A, np.eye(A.shape[0], dtype=complex), tol)


def determinant(A, tol: Tolerance = Tolerance(eps_eq=0.0)):
    """Determinant via LU; returns 0 for an exactly singular matrix."""
    A = as_matrix(A)
    try:
        fac = lu_factor(A, tol)
    except SingularMatrix:
        return 0j
    n = A.shape[0]
    swaps = n - len(_cycles(fac.perm))
    return (-1) ** swaps * complex(np.prod(np.diag(fac.lu)))


def _cycles(perm):
    seen = np.zeros(len(perm), bool)
    cycles = []
    for i in range(len(perm)):
        if not seen[i]:
            j, c = i, []
            while not seen[j]:
                seen[j] = True
                c.append(j)
                j = perm[j]
            cycles.append(c)
    return cycles


def infnorm(A) -> float:
    """Max-row-sum norm for matrices, max modulus for vectors."""
    A = np.asarray(A)
    if A.ndim == 1:
        return float(np.max(np.abs(A))) if A.size else 0.0
    return float(np.max(np.sum(np.abs(A), axis=1))) if A.size else 0.0


# ---------------------------------------------------------------------------
# products


def kron(A, B):
    return np.kron(as_matrix(A, "A"), as_matrix(B, "B"))


def hadamard_product(x, y):
    x, y = as_vector(x, "x"), as_vector(y, "y")
    if x.shape != y.shape:
        raise LengthMismatch(f"lengths differ: {len(x)} vs {len(y)}")
    return x * y


def hadamard_power(x, p: int):
    """Entrywise ``p``-th power, with ``x**0 == e``."""
    x = as_vector(x)
    if p == 0:
        return np.ones_like(x)
    if p < 0:
        return hadamard_power(hadamard_inverse(x), -p)
    return x ** p


def hadamard_inverse(x):
    x = as_vector(x)
    if np.any(x == 0):
        raise ValueError("Hadamard inverse needs a totally nonzero vector")
    return 1.0 / x


# ---------------------------------------------------------------------------
# predicates


def is_nonneg(A, tol: Tolerance = DEFAULT_TOL) -> bool:
    """Nonnegativity over C: ``Re >= -eps`` and ``|Im| <= eps`` entrywise."""
    A = np.asarray(A, dtype=complex)
    return bool(np.all(A.real >= -tol.eps_nonneg) and np.all(np.abs(A.imag) <= tol.eps_nonneg))


def is_stochastic(A, tol: Tolerance = DEFAULT_TOL) -> bool:
    A = as_matrix(A)
    if A.shape[0] != A.shape[1]:
        raise DimensionMismatch("stochasticity is defined for square matrices")
    return is_nonneg(A, tol) and infnorm(A.sum(axis=1) - 1.0) <= tol.eps_eq


def characteristic_polynomial(A):
    """Coefficients of ``det(tI - A)`` in ascending degree (Faddeev-LeVerrier).

    Meant for the small orders used here (n <= ~12).
    """
    A = as_matrix(A)
    n = A.shape[0]
    coeffs = np.zeros(n + 1, dtype=complex)
    coeffs[n] = 1.0
    M = np.zeros_like(A)
    I = np.eye(n, dtype=complex)
    for k in range(1, n + 1):
        M = A @ M + coeffs[n - k + 1] * I
        coeffs[n - k] = -np.trace(A @ M) / k
    return coeffs


def multiset_match(a, b, atol: float) -> bool:
    """True iff ``a`` and ``b`` agree as multisets up to ``atol`` (greedy)."""
    a, b = as_vector(a), as_vector(b)
    if a.shape != b.shape:
        return False
    free = np.ones(len(b), bool)
    for value in a:
        d = np.where(free, np.abs(b - value), np.inf)
        j = int(np.argmin(d)) if len(d) else -1
        if j < 0 or d[j] > atol:
            return False
        free[j] = False
    return True


# ---------------------------------------------------------------------------
# text I/O

_UNUM = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_NUM = r"[+-]?" + _UNUM
_PURE_IMAG = re.compile(rf"^\s*(?P<im>{_NUM})\s*i\s*$")
_GENERAL = re.compile(rf"^\s*(?P<re>{_NUM})\s*(?:(?P<sign>[+-])\s*(?P<im>{_UNUM})\s*i)?\s*$")


def parse_complex(text: str) -> complex:
    """Parse ``a``, ``bi``, ``a+bi`` or ``a-bi``. A bare ``i`` is rejected."""
    m = _PURE_IMAG.match(text)
    if m:
        return complex(0.0, float(m["im"]))
    m = _GENERAL.match(text)
    if not m:
        raise ParseError(f"not a complex literal: {text!r}")
    im = 0.0
    if m["im"] is not None:
        im = float(m["im"]) if m["sign"] == "+" else -float(m["im"])
    return complex(float(m["re"]), im)


def format_complex(z) -> str:
    z = complex(z)
    return f"{z.real:.17g}{z.imag:+.17g}i"


def matrix_to_json(A) -> list:
    return [[format_complex(z) for z in row] for row in np.asarray(A)]


def matrix_from_json(data) -> np.ndarray:
    if isinstance(data, str):
        data = json.loads(data)
    rows = [[parse_complex(str(z)) if isinstance(z, str) else complex(z) for z in row] for row in data]
    if len({len(r) for r in rows}) > 1:
        raise ParseError("ragged matrix rows")
    return as_matrix(rows)
