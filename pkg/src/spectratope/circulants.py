"""DFT and circulant matrices, Walsh and Klein matrices, Kronecker similarities.

``dft(n)`` is the unnormalized Fourier matrix ``F_ij = w^(ij)`` (0-based) with
the clockwise root ``w = exp(-2 pi i / n)``, so ``F^{-1} = conj(F) / n``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

from .exceptions import DimensionMismatch, NotPerronSimilarity
from .numerics import DEFAULT_TOL, Tolerance, as_vector, is_nonneg
from .perron import PerronSimilarity, as_similarity, is_perron_similarity

_QUARTER = np.array([1, -1j, -1, 1j])  # w^(k n/4) for k = 0..3, clockwise


def dft(n: int) -> np.ndarray:
    """Unnormalized ``n``-by-``n`` DFT matrix; quarter-turn entries are exact."""
    if n < 1:
        raise ValueError("order must be >= 1")
    k = np.outer(np.arange(n), np.arange(n)) % n
    F = np.exp(-2j * np.pi * k / n)
    exact = (4 * k) % n == 0
    F[exact] = _QUARTER[(4 * k[exact]) // n]
    return F


def dft_inverse(n: int) -> np.ndarray:
    return np.conj(dft(n)) / n


def circulant(c) -> np.ndarray:
    """Circulant with first row ``c``: ``C[i, j] = c[(j - i) mod n]``."""
    c = as_vector(c, "reference vector")
    n = len(c)
    idx = (np.arange(n)[None, :] - np.arange(n)[:, None]) % n
    return c[idx]


def circulant_eigenvalues(c) -> np.ndarray:
    """Eigenvalues of ``circulant(c)`` as ``conj(F) c``; the k-th belongs to
    the eigenvector ``conj(F)[:, k]``."""
    c = as_vector(c, "reference vector")
    return np.conj(dft(len(c))) @ c


@dataclass(frozen=True)
class CirculantCertificate:
    """Outcome of a circulant realizability test.

    ``reference`` is the first row of ``realizer``; ``eigenvalues`` are those
    of ``realizer`` evaluated through the known diagonalization.
    """

    verdict: bool
    reference: np.ndarray
    realizer: np.ndarray
    eigenvalues: np.ndarray

    def to_dict(self):
        from .numerics import format_complex, matrix_to_json
        return {
            "verdict": self.verdict,
            "certificate_reference_vector": [format_complex(z) for z in self.reference],
            "realizer_matrix": matrix_to_json(self.realizer),
        }


def circulant_realizable(x, tol: Tolerance = DEFAULT_TOL, convention: str = "forward") -> CirculantCertificate:
    """Decide whether ``x`` is the spectrum of a nonnegative circulant.

    The verdict is ``F x >= 0``. With ``convention="forward"`` the reference
    vector is ``F x / n`` and its circulant has eigenvalues exactly ``x`` in
    order; ``"inverse"`` uses ``F^{-1} x``, which lists the same multiset with
    conjugate slots reversed.
    """
    x = as_vector(x, "spectrum")
    n = len(x)
    F = dft(n)
    if convention == "forward":
        reference = F @ x / n
    elif convention == "inverse":
        reference = np.conj(F) @ x / n
    else:
        raise ValueError(f"unknown convention {convention!r}")
    verdict = is_nonneg(reference, tol)
    return CirculantCertificate(verdict, reference, circulant(reference), circulant_eigenvalues(reference))


def symmetric_slot_check(x, tol: Tolerance = DEFAULT_TOL) -> bool:
    """True iff ``x_0`` is real and ``conj(x_k) == x_{n-k}`` for ``k >= 1``."""
    x = as_vector(x, "spectrum")
    if len(x) < 2:
        raise ValueError("needs length >= 2")
    return bool(abs(x[0].imag) <= tol.eps_eq and np.max(np.abs(np.conj(x) - np.roll(x[::-1], 1))) <= tol.eps_eq)


@dataclass(frozen=True)
class BlockCirculantCertificate:
    verdict: bool
    transformed: np.ndarray
    realizer: np.ndarray


def block_circulant_realizable(x, m: int, n: int, tol: Tolerance = DEFAULT_TOL) -> BlockCirculantCertificate:
    """Test ``(F_m (x) F_n) x >= 0``; the realizer is the block-circulant
    ``(F_m (x) F_n) D_x (F_m (x) F_n)^{-1}``."""
    x = as_vector(x, "spectrum")
    if len(x) != m * n:
        raise DimensionMismatch(f"spectrum has length {len(x)}, expected {m}*{n}")
    K = np.kron(dft(m), dft(n))
    K_inv = np.conj(K) / (m * n)
    y = K @ x
    M = (K * x) @ K_inv
    return BlockCirculantCertificate(is_nonneg(y / (m * n), tol), y, M)


# ---------------------------------------------------------------------------
# Walsh and Klein matrices


def walsh(k: int) -> np.ndarray:
    """Sylvester Hadamard matrix of order ``2**k``."""
    if k < 0:
        raise ValueError("k must be >= 0")
    H2 = np.array([[1.0, 1.0], [1.0, -1.0]])
    return reduce(np.kron, [H2] * k, np.ones((1, 1)))


def klein_perms(k: int) -> list[np.ndarray]:
    """The ``2**k`` permutation matrices of the recursive block rule.

    The j-th matrix keeps the (j mod half)-th matrix of order ``k-1`` on the
    diagonal blocks for ``j < 2**(k-1)`` and on the anti-diagonal otherwise.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    perms = [np.eye(2), np.array([[0.0, 1.0], [1.0, 0.0]])]
    for _ in range(2, k + 1):
        Z = np.zeros_like(perms[0])
        perms = [np.block([[P, Z], [Z, P]]) for P in perms] + [np.block([[Z, P], [P, Z]]) for P in perms]
    return perms


def klein_matrix(x, k: int) -> np.ndarray:
    """Permutative matrix with rows ``x^T P_j`` over ``klein_perms(k)``."""
    x = np.asarray(x)
    if x.ndim != 1 or len(x) != 2 ** k:
        raise DimensionMismatch(f"need a vector of length {2 ** k}")
    return np.array([x @ P for P in klein_perms(k)])


def walsh_realizer(x, k: int) -> np.ndarray:
    """``2^-k H D_{Hx} H``, the matrix the Walsh similarity attaches to ``Hx``."""
    x = as_vector(x)
    H = walsh(k)
    if len(x) != len(H):
        raise DimensionMismatch(f"need a vector of length {len(H)}")
    return (H * (H @ x)) @ H / 2 ** k


# ---------------------------------------------------------------------------
# Kronecker products


def kron_similarity(factors, tol: Tolerance = DEFAULT_TOL) -> PerronSimilarity:
    """Left-fold Kronecker product of Perron similarities."""
    factors = list(factors)
    if not factors:
        raise ValueError("need at least one factor")
    sims = [as_similarity(f, tol) for f in factors]
    for i, S in enumerate(sims):
        if is_perron_similarity(S, tol) is None:
            raise NotPerronSimilarity(f"factor {i} is not a Perron similarity")
    if len(sims) == 1:
        return sims[0]
    S = reduce(np.kron, [s.S for s in sims])
    S_inv = reduce(np.kron, [s.S_inv for s in sims])
    return PerronSimilarity(S, S_inv, tol)


def commutation_permutation(m: int, n: int) -> np.ndarray:
    """Perfect shuffle ``P`` with ``A (x) B = P (B (x) A) P^T`` for ``A`` m-by-m
    and ``B`` n-by-n."""
    sigma = np.array([k * m + i for i in range(m) for k in range(n)])
    return np.eye(m * n)[sigma]
