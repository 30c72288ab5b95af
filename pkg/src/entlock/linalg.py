"""Dense complex linear algebra on multipartite operators.

Matrices are plain ``numpy`` complex arrays. Tensor factors are described by
a tuple of dimensions (``dims``) and indexed from 0; storage is row-major so
that factor 0 is the most significant index.
"""
from __future__ import annotations

from functools import reduce
from typing import Iterable, Sequence

import numpy as np

from .errors import BadShape, DimMismatch, NotHermitian

HERMITIAN_TOL = 1e-10


def as_dims(dims: Iterable[int]) -> tuple[int, ...]:
    dims = tuple(int(d) for d in dims)
    if not dims or any(d < 1 for d in dims):
        raise DimMismatch(f"invalid dimension list {dims}")
    return dims


def check_dims(dims: Sequence[int], size: int) -> tuple[int, ...]:
    dims = as_dims(dims)
    if int(np.prod(dims)) != size:
        raise DimMismatch(f"dims {dims} do not multiply to {size}")
    return dims


def kron(*mats: np.ndarray) -> np.ndarray:
    """Kronecker product of one or more matrices (or vectors)."""
    if not mats:
        raise BadShape("kron needs at least one operand")
    return reduce(np.kron, (np.asarray(m) for m in mats))


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(m, -1, -2))


def is_hermitian(m: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    return bool(np.max(np.abs(m - m.conj().T), initial=0.0) <= tol)


def hermitian_eig(m: np.ndarray, tol: float = HERMITIAN_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix.

    Returns ascending real eigenvalues and the matrix whose columns are the
    corresponding orthonormal eigenvectors. The input is symmetrized as
    ``(m + m^dagger) / 2`` after the Hermiticity check to absorb roundoff.
    """
    m = np.asarray(m, dtype=complex)
    if not is_hermitian(m, tol):
        raise NotHermitian("matrix is not Hermitian within %g" % tol)
    return np.linalg.eigh(0.5 * (m + m.conj().T))


def eigvalsh(m: np.ndarray) -> np.ndarray:
    """Eigenvalues of an (assumed) Hermitian matrix, ascending."""
    m = np.asarray(m)
    return np.linalg.eigvalsh(0.5 * (m + m.conj().T))


def _keep_axes(dims: tuple[int, ...], keep: Iterable[int]) -> tuple[list[int], list[int]]:
    keep = sorted(set(int(k) for k in keep))
    if not keep:
        raise DimMismatch("keep must be a nonempty set of factor indices")
    if keep[0] < 0 or keep[-1] >= len(dims):
        raise DimMismatch(f"factor indices {keep} out of range for dims {dims}")
    drop = [k for k in range(len(dims)) if k not in keep]
    return keep, drop


def partial_trace(rho: np.ndarray, dims: Sequence[int], keep: Iterable[int]) -> np.ndarray:
    """Reduce ``rho`` to the factors in ``keep`` (order of factors preserved)."""
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise DimMismatch("partial_trace expects a square matrix")
    dims = check_dims(dims, rho.shape[0])
    keep, drop = _keep_axes(dims, keep)
    n = len(dims)
    dk = int(np.prod([dims[k] for k in keep]))
    dt = int(np.prod([dims[k] for k in drop])) if drop else 1
    t = rho.reshape(dims + dims)
    t = t.transpose(keep + drop + [n + k for k in keep] + [n + k for k in drop])
    t = t.reshape(dk, dt, dk, dt)
    return np.einsum("ajbj->ab", t)


def reduced_from_vector(vec: np.ndarray, dims: Sequence[int], keep: Iterable[int]) -> np.ndarray:
    """Marginal of the pure state ``vec`` on the factors in ``keep``."""
    vec = np.asarray(vec)
    dims = check_dims(dims, vec.shape[0])
    keep, drop = _keep_axes(dims, keep)
    dk = int(np.prod([dims[k] for k in keep]))
    m = vec.reshape(dims).transpose(keep + drop).reshape(dk, -1)
    return m @ m.conj().T


def permute_systems(x: np.ndarray, dims: Sequence[int], perm: Sequence[int]) -> np.ndarray:
    """Reorder tensor factors of a vector or square matrix.

    Output factor ``i`` is input factor ``perm[i]``; the new dimension list is
    ``[dims[p] for p in perm]``.
    """
    x = np.asarray(x)
    dims = check_dims(dims, x.shape[0])
    perm = [int(p) for p in perm]
    if sorted(perm) != list(range(len(dims))):
        raise DimMismatch(f"{perm} is not a permutation of {len(dims)} factors")
    n = len(dims)
    if x.ndim == 1:
        return x.reshape(dims).transpose(perm).reshape(-1)
    if x.ndim == 2 and x.shape[0] == x.shape[1]:
        t = x.reshape(dims + dims).transpose(perm + [n + p for p in perm])
        return t.reshape(x.shape)
    raise DimMismatch("permute_systems expects a vector or a square matrix")


def inverse_permutation(perm: Sequence[int]) -> list[int]:
    inv = [0] * len(perm)
    for i, p in enumerate(perm):
        inv[p] = i
    return inv


def swap_operator(d: int) -> np.ndarray:
    """The flip ``F`` exchanging two ``d``-dimensional factors."""
    f = np.zeros((d * d, d * d))
    for i in range(d):
        for j in range(d):
            f[j * d + i, i * d + j] = 1.0
    return f


def default_rng(rng=None) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def haar_unitary(d: int, rng=None) -> np.ndarray:
    """Haar-distributed ``d x d`` unitary.

    QR decomposition of a complex Ginibre matrix, with the phases of the
    diagonal of ``R`` moved into ``Q`` so the distribution is exactly Haar.
    """
    if d < 1:
        raise BadShape("dimension must be >= 1")
    rng = default_rng(rng)
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    diag = np.diag(r)
    phases = np.where(np.abs(diag) > 0, diag / np.abs(diag), 1.0)
    return q * phases


def haar_isometry(d_in: int, d_out: int, rng=None) -> np.ndarray:
    """First ``d_in`` columns of a Haar unitary on ``d_out`` dimensions."""
    if d_out < d_in or d_in < 1:
        raise BadShape(f"cannot embed dimension {d_in} isometrically into {d_out}")
    return haar_unitary(d_out, rng)[:, :d_in]


def is_isometry(v: np.ndarray, tol: float = 1e-9) -> bool:
    v = np.asarray(v)
    if v.ndim != 2 or v.shape[0] < v.shape[1]:
        return False
    gram = v.conj().T @ v
    return bool(np.max(np.abs(gram - np.eye(v.shape[1]))) <= tol)


def random_hermitian(d: int, rng=None) -> np.ndarray:
    rng = default_rng(rng)
    a = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return 0.5 * (a + a.conj().T)
