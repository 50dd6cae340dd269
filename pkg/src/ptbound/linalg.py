"""Dense complex linear algebra for bipartite operators.

Conventions used throughout the package:

* product basis ordering is row-major with the first subsystem major, so
  ``|a>|b>`` sits at index ``a * d2 + b``;
* the partial transpose acts on the SECOND subsystem.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _kernels
from .errors import CapacityError, DimensionMismatchError, HermiticityError, NumericalFailure

MAX_DIM = 256
HERM_TOL = 1e-10
JACOBI_REL_TOL = 1e-13
JACOBI_MAX_SWEEPS = 100
TRACE_IMAG_TOL = 1e-10


def _check_capacity(dim):
    if dim > MAX_DIM:
        raise CapacityError(f"operator dimension {dim} exceeds the maximum {MAX_DIM}")


@dataclass(frozen=True, eq=False)
class HermitianOperator:
    """Immutable Hermitian matrix on C^d1 (x) C^d2.

    ``matrix`` is stored read-only. Construction verifies Hermiticity
    entrywise within ``herm_tol`` and then stores the exactly Hermitian part.
    """

    matrix: np.ndarray
    d1: int
    d2: int
    herm_tol: float = HERM_TOL

    def __post_init__(self):
        m = np.array(self.matrix, dtype=np.complex128, copy=True)
        dim = int(self.d1) * int(self.d2)
        if self.d1 < 1 or self.d2 < 1:
            raise DimensionMismatchError("subsystem dimensions must be positive")
        _check_capacity(dim)
        if m.shape != (dim, dim):
            raise DimensionMismatchError(
                f"matrix shape {m.shape} does not match d1*d2 = {dim}"
            )
        if not np.all(np.isfinite(m)):
            raise HermiticityError("matrix has non-finite entries")
        asym = np.max(np.abs(m - m.conj().T)) if dim else 0.0
        if asym > self.herm_tol:
            raise HermiticityError(f"matrix is not Hermitian (max |A - A^H| = {asym:.3e})")
        m = 0.5 * (m + m.conj().T)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "d1", int(self.d1))
        object.__setattr__(self, "d2", int(self.d2))

    @property
    def dim(self):
        return self.d1 * self.d2

    @property
    def dims(self):
        return (self.d1, self.d2)

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)

    def __add__(self, other):
        return HermitianOperator(self.matrix + _mat(other), self.d1, self.d2)

    def __sub__(self, other):
        return HermitianOperator(self.matrix - _mat(other), self.d1, self.d2)

    def __mul__(self, scalar):
        if not np.isrealobj(scalar):
            return NotImplemented
        return HermitianOperator(self.matrix * float(scalar), self.d1, self.d2)

    __rmul__ = __mul__

    def __repr__(self):
        return f"HermitianOperator(d1={self.d1}, d2={self.d2})"


@dataclass(frozen=True)
class Spectrum:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    sweeps: int = 0


def _mat(x):
    if isinstance(x, HermitianOperator):
        return x.matrix
    return np.asarray(x, dtype=np.complex128)


def _dims_of(e, dims):
    if dims is not None:
        return int(dims[0]), int(dims[1])
    if isinstance(e, HermitianOperator):
        return e.dims
    raise DimensionMismatchError("subsystem dimensions are required for a bare array")


def kron(a, b):
    """Kronecker product; the first factor indexes the coarse blocks."""
    a = _mat(a)
    b = _mat(b)
    if a.ndim != 2 or b.ndim != 2:
        raise DimensionMismatchError("kron expects two matrices")
    _check_capacity(a.shape[0] * b.shape[0])
    _check_capacity(a.shape[1] * b.shape[1])
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise NumericalFailure("kron received non-finite entries")
    return np.kron(a, b)


def pt_matrix(m, d1, d2):
    """Partial transpose of a raw (d1*d2)x(d1*d2) array over the second factor."""
    m = np.asarray(m)
    t = m.reshape(d1, d2, d1, d2)
    return t.transpose(0, 3, 2, 1).reshape(d1 * d2, d1 * d2)


def partial_transpose(e, dims=None):
    """Transpose the second subsystem: entry ((a,b),(c,d)) -> ((a,d),(c,b)).

    Returns a :class:`HermitianOperator` when given one, else a bare array
    (``dims`` must then be provided).
    """
    d1, d2 = _dims_of(e, dims)
    out = pt_matrix(_mat(e), d1, d2)
    if isinstance(e, HermitianOperator):
        return HermitianOperator(out, d1, d2, e.herm_tol)
    return out.copy()


@lru_cache(maxsize=64)
def pt_permutation(d1, d2):
    """Index map p with vec(PT(X)) = vec(X)[p] for row-major vec."""
    dim = d1 * d2
    idx = np.arange(dim * dim).reshape(dim, dim)
    p = pt_matrix(idx, d1, d2).ravel().copy()
    p.setflags(write=False)
    return p


def eig_hermitian(e):
    """Full spectral decomposition by cyclic Jacobi rotations.

    Eigenvalues are returned ascending with eigenvectors as matching columns.
    Raises :class:`NumericalFailure` if the off-diagonal Frobenius norm is
    still above ``1e-13 * D * max(1, ||e||_F)`` after 100 sweeps.
    """
    m = _mat(e)
    dim = m.shape[0]
    if m.shape != (dim, dim):
        raise DimensionMismatchError("eig_hermitian expects a square matrix")
    _check_capacity(dim)
    if not isinstance(e, HermitianOperator):
        asym = np.max(np.abs(m - m.conj().T)) if dim else 0.0
        if asym > HERM_TOL * max(1.0, np.max(np.abs(m))):
            raise HermiticityError(f"matrix is not Hermitian (max |A - A^H| = {asym:.3e})")
        m = 0.5 * (m + m.conj().T)
    if dim == 0:
        return Spectrum(np.zeros(0), np.zeros((0, 0), dtype=np.complex128))
    scale = max(1.0, float(np.linalg.norm(m)))
    tol = JACOBI_REL_TOL * dim * scale
    w, v, sweeps, off = _kernels.jacobi(m, tol, JACOBI_MAX_SWEEPS)
    if off > tol:
        raise NumericalFailure(
            f"Jacobi eigensolver did not converge in {JACOBI_MAX_SWEEPS} sweeps", residual=off
        )
    return Spectrum(w, v, int(sweeps))


def eigvals_hermitian(e):
    return eig_hermitian(e).eigenvalues


def min_eigenvalue(e):
    return float(eig_hermitian(e).eigenvalues[0])


def is_psd(e, tol=1e-10):
    return min_eigenvalue(e) >= -tol


def trace_inner(a, b):
    """Real value of Tr(a b) for Hermitian a, b."""
    a = _mat(a)
    b = _mat(b)
    if a.shape != b.shape:
        raise DimensionMismatchError(f"shape mismatch {a.shape} vs {b.shape}")
    # Tr(ab) = sum_jk a_jk b_kj
    t = np.sum(a * b.T)
    if abs(t.imag) > TRACE_IMAG_TOL * max(1.0, abs(t.real)):
        raise NumericalFailure(f"Tr(ab) has imaginary part {t.imag:.3e}", residual=abs(t.imag))
    return float(t.real)


def trace_norm(e):
    return float(np.sum(np.abs(eig_hermitian(e).eigenvalues)))


def psd_sqrt_inv(m):
    """Inverse square root of a positive definite Hermitian array."""
    spec = eig_hermitian(m)
    w = spec.eigenvalues
    if w[0] <= 0:
        raise NumericalFailure("matrix is not positive definite", residual=w[0])
    v = spec.eigenvectors
    return (v / np.sqrt(w)) @ v.conj().T

