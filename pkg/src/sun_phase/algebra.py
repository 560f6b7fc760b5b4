"""Complex matrix core and su(n) Lie-algebra structure.

Generator bases in the defining representation, normalized so that
Tr(g_a g_b) = 2 delta_ab, together with the trace inner product they
induce, the completeness identity on the fundamental representation,
and one-parameter unitary subgroups built from a Hermitian
eigendecomposition.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DimensionError,
    DomainError,
    InternalConsistencyError,
    ShapeError,
)
from .tolerances import ATOL_CONSTRUCTION, ATOL_IDENTITY


def dagger(a: np.ndarray) -> np.ndarray:
    """Hermitian conjugate."""
    return a.conj().T


def is_hermitian(a: np.ndarray, tol: float = ATOL_CONSTRUCTION) -> bool:
    return bool(np.max(np.abs(a - dagger(a))) < tol)


def is_unitary(u: np.ndarray, tol: float = ATOL_CONSTRUCTION) -> bool:
    n = u.shape[0]
    return bool(np.max(np.abs(dagger(u) @ u - np.eye(n))) < tol)


def is_traceless(a: np.ndarray, tol: float = ATOL_CONSTRUCTION) -> bool:
    return bool(abs(np.trace(a)) < tol)


def _check_square(a: np.ndarray, name: str = "matrix") -> int:
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ShapeError(f"{name} must be square, got shape {a.shape}")
    return a.shape[0]


@dataclass(frozen=True)
class GeneratorBasis:
    """Ordered basis of the n^2 - 1 traceless Hermitian generators of su(n).

    `matrices` is stacked with shape (n^2 - 1, n, n); the ordering is fixed
    (symmetric pair type, then antisymmetric pair type, then diagonal) so
    that callers can index generators deterministically.
    """

    n: int
    matrices: np.ndarray

    def __len__(self) -> int:
        return self.matrices.shape[0]

    def __getitem__(self, a: int) -> np.ndarray:
        return self.matrices[a]

    def __iter__(self):
        return iter(self.matrices)

    @property
    def dim_algebra(self) -> int:
        return self.n * self.n - 1


@dataclass(frozen=True)
class StatePair:
    """Fixed initial/final unit vectors for transition amplitudes."""

    psi_i: np.ndarray
    psi_f: np.ndarray

    def __post_init__(self):
        for name, v in (("psi_i", self.psi_i), ("psi_f", self.psi_f)):
            if v.ndim != 1:
                raise ShapeError(f"{name} must be a vector, got shape {v.shape}")
            if abs(np.linalg.norm(v) - 1.0) >= ATOL_CONSTRUCTION:
                raise DomainError(f"{name} is not unit-norm")
        if self.psi_i.shape != self.psi_f.shape:
            raise ShapeError("state vectors have different dimensions")
        if len(self.psi_i) < 2:
            raise DimensionError("states must live in dimension >= 2")

    @classmethod
    def from_vectors(cls, psi_i, psi_f) -> "StatePair":
        """Build a pair from arbitrary nonzero vectors, normalizing them."""
        psi_i = np.asarray(psi_i, dtype=complex)
        psi_f = np.asarray(psi_f, dtype=complex)
        ni, nf = np.linalg.norm(psi_i), np.linalg.norm(psi_f)
        if ni == 0.0 or nf == 0.0:
            raise DomainError("cannot normalize a zero vector")
        return cls(psi_i / ni, psi_f / nf)

    @property
    def n(self) -> int:
        return len(self.psi_i)


def build_gellmann_basis(n: int) -> GeneratorBasis:
    """Generalized Gell-Mann generators of su(n), Tr(g_a g_b) = 2 delta_ab.

    Ordering: symmetric off-diagonal pairs E_jk + E_kj by (j, k)
    lexicographic, then antisymmetric pairs -i E_jk + i E_kj, then the
    n - 1 diagonal generators.  For n = 2 this yields the Pauli matrices
    (sigma_x, sigma_y, sigma_z).
    """
    if n < 2:
        raise DimensionError(f"group dimension must be >= 2, got {n}")
    gens = []
    for j in range(n):
        for k in range(j + 1, n):
            x = np.zeros((n, n), dtype=complex)
            x[j, k] = 1.0
            x[k, j] = 1.0
            gens.append(x)
    for j in range(n):
        for k in range(j + 1, n):
            y = np.zeros((n, n), dtype=complex)
            y[j, k] = -1.0j
            y[k, j] = 1.0j
            gens.append(y)
    for l in range(1, n):
        d = np.zeros((n, n), dtype=complex)
        for j in range(l):
            d[j, j] = 1.0
        d[l, l] = -float(l)
        gens.append(d * np.sqrt(2.0 / (l * (l + 1))))
    return GeneratorBasis(n=n, matrices=np.array(gens))


def killing_inner(a: np.ndarray, b: np.ndarray) -> float:
    """Trace inner product (1/2) Re Tr(ab).

    On Hermitian operands the trace is real; a significant imaginary part
    indicates corrupted inputs and raises.
    """
    na = _check_square(a, "a")
    nb = _check_square(b, "b")
    if na != nb:
        raise ShapeError(f"dimension mismatch: {na} vs {nb}")
    t = np.trace(a @ b)
    if is_hermitian(a) and is_hermitian(b) and abs(t.imag) >= ATOL_CONSTRUCTION:
        raise InternalConsistencyError(
            f"trace of Hermitian product has imaginary part {t.imag:.3e}"
        )
    return 0.5 * t.real


def completeness_residual(x: np.ndarray, y: np.ndarray, basis: GeneratorBasis) -> float:
    """Residual of the fundamental-representation completeness identity.

    |(1/2) sum_a Tr(x g_a y g_a)  -  (Tr x Tr y - Tr(xy)/n)|

    Vanishes identically for an exactly orthonormal basis; the returned
    size measures basis quality.
    """
    n = _check_square(x, "x")
    if _check_square(y, "y") != n or basis.n != n:
        raise ShapeError("x, y and basis must share one dimension")
    lhs = 0.5 * sum(np.trace(x @ g @ y @ g) for g in basis)
    rhs = np.trace(x) * np.trace(y) - np.trace(x @ y) / n
    return float(abs(lhs - rhs))


def expm_generator(l: np.ndarray, t: float = 1.0) -> np.ndarray:
    """exp(i l t) for Hermitian l, via eigendecomposition.

    Exactly unitary up to eigensolver error, and det = 1 whenever l is
    traceless.  The eigenvalues are the angular frequencies of every
    matrix element of the resulting one-parameter subgroup.
    """
    n = _check_square(l, "generator")
    if np.max(np.abs(l - dagger(l))) >= ATOL_IDENTITY:
        raise DomainError("generator is not Hermitian")
    w, v = np.linalg.eigh(l)
    u = (v * np.exp(1j * w * t)) @ dagger(v)
    if np.max(np.abs(dagger(u) @ u - np.eye(n))) >= ATOL_IDENTITY:
        raise InternalConsistencyError("exponential lost unitarity")
    return u


def haar_state(n: int, rng: np.random.Generator) -> np.ndarray:
    """Random unit vector, uniform on the sphere in C^n."""
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return v / np.linalg.norm(v)


def random_hermitian(n: int, rng: np.random.Generator, traceless: bool = False) -> np.ndarray:
    """Random Hermitian matrix with O(1) entries."""
    m = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    h = (m + dagger(m)) / 2.0
    if traceless:
        h = h - np.trace(h).real * np.eye(n) / n
    return h
