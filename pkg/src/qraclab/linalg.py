"""Hermitian linear algebra kernels and the basic quantum containers.

Everything downstream (measurements, decoders, solvers) is built on the
handful of operations here, so tolerances and support-cutoff semantics
are fixed in this module and imported elsewhere.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    BadSplitError,
    DimensionMismatchError,
    NotHermitianError,
    SizeCapError,
    ValidationError,
)

# Default tolerances.  Absolute, chosen for dimensions up to DIM_CAP.
TOL_HERM = 1e-9
TOL_TRACE = 1e-9
TOL_POVM = 1e-9
TOL_PSD = 1e-10
TOL_EIG = 1e-8
SUPPORT_CUTOFF = 1e-12  # relative to the largest eigenvalue
DIM_CAP = 2**10


def _as_array(a) -> np.ndarray:
    if isinstance(a, DensityMatrix):
        return a.mat
    return np.asarray(a, dtype=complex)


def check_dim_cap(dim: int) -> None:
    if dim > DIM_CAP:
        raise SizeCapError(f"dimension {dim} exceeds cap {DIM_CAP}")


def is_hermitian(a, tol: float = TOL_HERM) -> bool:
    a = _as_array(a)
    return a.shape[0] == a.shape[1] and np.abs(a - a.conj().T).max() <= tol


def eig_hermitian(a, tol: float = TOL_HERM) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (descending) and orthonormal eigenvector columns of a.

    Raises NotHermitianError if ``a`` deviates from Hermitian symmetry by
    more than ``tol`` in any entry.
    """
    a = _as_array(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got shape {a.shape}")
    if not is_hermitian(a, tol):
        raise NotHermitianError(
            f"matrix deviates from Hermitian symmetry by {np.abs(a - a.conj().T).max():.3e}"
        )
    vals, vecs = np.linalg.eigh(a)
    return vals[::-1], vecs[:, ::-1]


def _sqrt_pinv_with_support(a: np.ndarray, cutoff: float) -> tuple[np.ndarray, np.ndarray]:
    """Inverse square root on the support of ``a`` plus the support projector."""
    vals, vecs = eig_hermitian(a)
    top = vals[0]
    if top <= 0.0:
        dim = a.shape[0]
        return np.zeros((dim, dim), dtype=complex), np.zeros((dim, dim), dtype=complex)
    keep = vals >= cutoff * top
    kept_vecs = vecs[:, keep]
    inv_sqrt = (kept_vecs * (vals[keep] ** -0.5)) @ kept_vecs.conj().T
    proj = kept_vecs @ kept_vecs.conj().T
    return inv_sqrt, proj


def sqrt_pinv_on_support(rho, cutoff: float = SUPPORT_CUTOFF) -> np.ndarray:
    """rho^{-1/2} restricted to the support of rho.

    Eigenvalues below ``cutoff`` times the largest eigenvalue are treated
    as zero and excluded from the inversion.
    """
    return _sqrt_pinv_with_support(_as_array(rho), cutoff)[0]


def support_projector(rho, cutoff: float = SUPPORT_CUTOFF) -> np.ndarray:
    """Orthogonal projector onto the support of rho."""
    return _sqrt_pinv_with_support(_as_array(rho), cutoff)[1]


def trace_norm(a) -> float:
    """Sum of singular values; for Hermitian input, sum of |eigenvalues|."""
    a = _as_array(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatchError(f"expected a square matrix, got shape {a.shape}")
    if is_hermitian(a):
        return float(np.abs(np.linalg.eigvalsh(a)).sum())
    return float(np.linalg.svd(a, compute_uv=False).sum())


def trace_distance(rho, sigma) -> float:
    """Half the trace norm of the difference of two states."""
    r, s = _as_array(rho), _as_array(sigma)
    if r.shape != s.shape:
        raise DimensionMismatchError(f"shape mismatch {r.shape} vs {s.shape}")
    return 0.5 * trace_norm(r - s)


def tensor(a, b) -> np.ndarray:
    """Kronecker product; the first factor is the most significant register."""
    return np.kron(_as_array(a), _as_array(b))


def partial_trace(a, dims: tuple[int, ...], keep: tuple[int, ...]) -> np.ndarray:
    """Trace out all subsystems not listed in ``keep``.

    ``dims`` are the subsystem dimensions in register order; their product
    must equal the matrix dimension.
    """
    a = _as_array(a)
    total = int(np.prod(dims))
    if a.shape != (total, total):
        raise BadSplitError(f"dims {dims} do not factor shape {a.shape}")
    k = len(dims)
    keep = tuple(sorted(keep))
    reshaped = a.reshape(dims + dims)
    for sub in sorted(set(range(k)) - set(keep), reverse=True):
        reshaped = np.trace(reshaped, axis1=sub, axis2=sub + reshaped.ndim // 2)
    d_keep = int(np.prod([dims[i] for i in keep])) if keep else 1
    return reshaped.reshape(d_keep, d_keep)


def _frozen(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=complex)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class DensityMatrix:
    """A validated density matrix: Hermitian, PSD, unit trace."""

    mat: np.ndarray
    tol_herm: float = field(default=TOL_HERM, repr=False)
    tol_psd: float = field(default=TOL_PSD, repr=False)
    tol_trace: float = field(default=TOL_TRACE, repr=False)

    def __post_init__(self):
        mat = _as_array(self.mat)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValidationError(f"expected a square matrix, got shape {mat.shape}")
        check_dim_cap(mat.shape[0])
        if not is_hermitian(mat, self.tol_herm):
            raise NotHermitianError("density matrix is not Hermitian within tolerance")
        tr = mat.trace().real
        if abs(tr - 1.0) > self.tol_trace:
            raise ValidationError(f"trace {tr} is not 1 within {self.tol_trace}")
        if np.linalg.eigvalsh(mat).min() < -self.tol_psd:
            raise ValidationError("density matrix has a negative eigenvalue beyond tolerance")
        object.__setattr__(self, "mat", _frozen(mat))

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    @classmethod
    def from_state_vector(cls, vec) -> "DensityMatrix":
        v = np.asarray(vec, dtype=complex).reshape(-1)
        norm = np.linalg.norm(v)
        if norm == 0:
            raise ValidationError("zero state vector")
        v = v / norm
        return cls(np.outer(v, v.conj()))

    @classmethod
    def maximally_mixed(cls, dim: int) -> "DensityMatrix":
        return cls(np.eye(dim) / dim)


@dataclass(frozen=True)
class Povm:
    """A positive operator-valued measure with integer outcome labels.

    Elements must each be Hermitian and PSD within tolerance and must sum
    to the identity entrywise within ``tol_povm``.
    """

    elements: tuple[np.ndarray, ...]
    outcomes: tuple[int, ...] = None
    tol_povm: float = field(default=TOL_POVM, repr=False)
    tol_psd: float = field(default=TOL_PSD, repr=False)

    def __post_init__(self):
        elements = tuple(_as_array(e) for e in self.elements)
        if not elements:
            raise ValidationError("measurement needs at least one element")
        dim = elements[0].shape[0]
        check_dim_cap(dim)
        outcomes = self.outcomes
        if outcomes is None:
            outcomes = tuple(range(len(elements)))
        else:
            outcomes = tuple(int(o) for o in outcomes)
        if len(outcomes) != len(elements):
            raise ValidationError("one outcome label per element required")
        if len(set(outcomes)) != len(outcomes):
            raise ValidationError("duplicate outcome labels")
        total = np.zeros((dim, dim), dtype=complex)
        for e in elements:
            if e.shape != (dim, dim):
                raise DimensionMismatchError("measurement elements differ in dimension")
            if not is_hermitian(e):
                raise NotHermitianError("measurement element is not Hermitian within tolerance")
            if np.linalg.eigvalsh(e).min() < -self.tol_psd:
                raise ValidationError("measurement element has a negative eigenvalue")
            total += e
        if np.abs(total - np.eye(dim)).max() > self.tol_povm:
            raise ValidationError(
                f"elements sum to identity only within "
                f"{np.abs(total - np.eye(dim)).max():.3e} > {self.tol_povm}"
            )
        object.__setattr__(self, "elements", tuple(_frozen(e) for e in elements))
        object.__setattr__(self, "outcomes", outcomes)

    @property
    def dim(self) -> int:
        return self.elements[0].shape[0]

    def __len__(self) -> int:
        return len(self.elements)

    def probabilities(self, rho) -> np.ndarray:
        """Outcome probabilities for measuring ``rho``, in stored order."""
        r = _as_array(rho)
        return np.array([np.einsum("ij,ji->", e, r).real for e in self.elements])
