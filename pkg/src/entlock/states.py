"""States, ensembles and the fixed operators they are built from."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import linalg
from .errors import BadShape, DimMismatch, NotAState, RankTooLarge

STATE_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """Positive, unit-trace Hermitian matrix on a tensor product of factors."""

    mat: np.ndarray
    dims: tuple[int, ...]
    validate: bool = field(default=True, repr=False)

    def __post_init__(self):
        mat = np.asarray(self.mat, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise DimMismatch("density operator must be a square matrix")
        object.__setattr__(self, "mat", mat)
        object.__setattr__(self, "dims", linalg.check_dims(self.dims, mat.shape[0]))
        if self.validate:
            if not linalg.is_hermitian(mat, STATE_TOL):
                raise NotAState("matrix is not Hermitian")
            if abs(np.trace(mat).real - 1.0) > STATE_TOL:
                raise NotAState(f"trace is {np.trace(mat).real!r}, not 1")
            if linalg.eigvalsh(mat)[0] < -STATE_TOL:
                raise NotAState("matrix has a negative eigenvalue")

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    def marginal(self, keep) -> "DensityOperator":
        keep = sorted(set(keep))
        return DensityOperator(
            linalg.partial_trace(self.mat, self.dims, keep),
            tuple(self.dims[k] for k in keep),
            validate=False,
        )

    def permute(self, perm) -> "DensityOperator":
        return DensityOperator(
            linalg.permute_systems(self.mat, self.dims, perm),
            tuple(self.dims[p] for p in perm),
            validate=False,
        )

    def tensor(self, other: "DensityOperator") -> "DensityOperator":
        return DensityOperator(
            np.kron(self.mat, other.mat), self.dims + other.dims, validate=False
        )

    def rank(self, tol: float = 1e-12) -> int:
        return int(np.sum(linalg.eigvalsh(self.mat) > tol))


@dataclass(frozen=True, eq=False)
class PureState:
    """Unit vector on a tensor product; ``purifying_factor`` marks a purifier."""

    vec: np.ndarray
    dims: tuple[int, ...]
    purifying_factor: int | None = None

    def __post_init__(self):
        vec = np.asarray(self.vec, dtype=complex).reshape(-1)
        object.__setattr__(self, "vec", vec)
        object.__setattr__(self, "dims", linalg.check_dims(self.dims, vec.shape[0]))
        if abs(np.linalg.norm(vec) - 1.0) > STATE_TOL:
            raise NotAState("state vector is not normalized")
        pf = self.purifying_factor
        if pf is not None and not 0 <= pf < len(self.dims):
            raise DimMismatch(f"purifying factor {pf} out of range")

    def density(self) -> DensityOperator:
        return DensityOperator(np.outer(self.vec, self.vec.conj()), self.dims, validate=False)

    def marginal(self, keep) -> DensityOperator:
        keep = sorted(set(keep))
        return DensityOperator(
            linalg.reduced_from_vector(self.vec, self.dims, keep),
            tuple(self.dims[k] for k in keep),
            validate=False,
        )

    def reduced(self) -> DensityOperator:
        """The purified state: trace out the purifying factor."""
        if self.purifying_factor is None:
            raise DimMismatch("state has no designated purifying factor")
        keep = [k for k in range(len(self.dims)) if k != self.purifying_factor]
        return self.marginal(keep)


@dataclass(frozen=True, eq=False)
class Ensemble:
    """Finite list of ``(probability, DensityOperator)`` pairs on common dims."""

    items: tuple[tuple[float, DensityOperator], ...]

    def __post_init__(self):
        items = tuple((float(p), s) for p, s in self.items)
        if not items:
            raise BadShape("ensemble is empty")
        probs = np.array([p for p, _ in items])
        if np.any(probs < 0) or abs(probs.sum() - 1.0) > STATE_TOL:
            raise NotAState("ensemble probabilities must be a distribution")
        if len({s.dims for _, s in items}) != 1:
            raise DimMismatch("ensemble members live on different spaces")
        object.__setattr__(self, "items", items)

    @property
    def probs(self) -> np.ndarray:
        return np.array([p for p, _ in self.items])

    @property
    def states(self) -> list[DensityOperator]:
        return [s for _, s in self.items]

    @property
    def dims(self) -> tuple[int, ...]:
        return self.items[0][1].dims

    def average(self) -> DensityOperator:
        mat = sum(p * s.mat for p, s in self.items)
        return DensityOperator(mat, self.dims, validate=False)

    def mix(self, other: "Ensemble", weight: float = 0.5) -> "Ensemble":
        """``weight * self + (1 - weight) * other`` as a single ensemble."""
        return Ensemble(
            tuple((weight * p, s) for p, s in self.items)
            + tuple(((1 - weight) * p, s) for p, s in other.items)
        )


def projector(vec: np.ndarray, dims=None) -> DensityOperator:
    vec = np.asarray(vec, dtype=complex)
    vec = vec / np.linalg.norm(vec)
    return DensityOperator(np.outer(vec, vec.conj()), dims or (vec.shape[0],), validate=False)


def basis_vector(d: int, i: int) -> np.ndarray:
    v = np.zeros(d, dtype=complex)
    v[i] = 1.0
    return v


# -- fixed operators ---------------------------------------------------------

def fourier_unitary(d: int) -> np.ndarray:
    """``U[j, k] = exp(2 pi i j k / d) / sqrt(d)`` with 0-based labels."""
    if d < 1:
        raise BadShape("dimension must be >= 1")
    j = np.arange(d)
    return np.exp(2j * np.pi * np.outer(j, j) / d) / np.sqrt(d)


HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2.0)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def hadamard_tensor(l: int) -> np.ndarray:
    if l < 1:
        raise BadShape("need at least one qubit")
    return linalg.kron(*([HADAMARD] * l))


def weyl_x(d: int) -> np.ndarray:
    """Cyclic shift ``X|i> = |i+1 mod d>``."""
    return np.roll(np.eye(d, dtype=complex), 1, axis=0)


def weyl_z(d: int) -> np.ndarray:
    """Clock operator ``Z|i> = exp(2 pi i i/d)|i>``."""
    return np.diag(np.exp(2j * np.pi * np.arange(d) / d))


class AbelianGroup:
    """Regular representation of ``Z_d`` or ``Z_2^l`` and its Fourier transform.

    ``shift(a)`` permutes the computational basis by group element ``a``;
    ``phase(b)`` is the conjugate (character) operator, diagonal in the
    computational basis. Elements are integers ``0..d-1``; for ``Z_2^l`` an
    element is read as an ``l``-bit string, most significant bit first.
    """

    def __init__(self, kind: str, d: int):
        kind = kind.lower()
        if kind not in ("zd", "z2l"):
            raise ValueError(f"unknown group {kind!r}")
        if d < 1:
            raise BadShape("dimension must be >= 1")
        if kind == "z2l":
            l = d.bit_length() - 1
            if 1 << l != d or l < 1:
                raise BadShape(f"Z_2^l needs d a power of two >= 2, got {d}")
            self.l = l
        self.kind = kind
        self.d = d

    @classmethod
    def cyclic(cls, d: int) -> "AbelianGroup":
        return cls("zd", d)

    @classmethod
    def binary(cls, l: int) -> "AbelianGroup":
        return cls("z2l", 1 << l)

    def __repr__(self):
        return f"AbelianGroup({self.kind!r}, {self.d})"

    def elements(self) -> range:
        return range(self.d)

    def _bits(self, a: int) -> list[int]:
        return [(a >> (self.l - 1 - k)) & 1 for k in range(self.l)]

    def fourier(self) -> np.ndarray:
        if self.kind == "zd":
            return fourier_unitary(self.d)
        return hadamard_tensor(self.l)

    def shift(self, a: int) -> np.ndarray:
        if self.kind == "zd":
            return np.linalg.matrix_power(weyl_x(self.d), a % self.d)
        return linalg.kron(*[SIGMA_X if bit else np.eye(2) for bit in self._bits(a)])

    def phase(self, b: int) -> np.ndarray:
        if self.kind == "zd":
            return np.linalg.matrix_power(weyl_z(self.d), b % self.d)
        return linalg.kron(*[SIGMA_Z if bit else np.eye(2) for bit in self._bits(b)])


# -- state families ----------------------------------------------------------

def maximally_mixed(d: int) -> DensityOperator:
    if d < 1:
        raise BadShape("dimension must be >= 1")
    return DensityOperator(np.eye(d) / d, (d,), validate=False)


def max_entangled(d: int) -> PureState:
    if d < 1:
        raise BadShape("dimension must be >= 1")
    return PureState(np.eye(d).reshape(-1) / np.sqrt(d), (d, d))


def basis_ensembles(d: int, u: np.ndarray) -> tuple[Ensemble, Ensemble]:
    """Uniform computational-basis ensemble and its rotation by ``u``."""
    u = np.asarray(u, dtype=complex)
    if u.shape != (d, d) or not linalg.is_isometry(u, 1e-9):
        raise BadShape("rotation must be a d x d unitary")
    e0 = Ensemble(tuple((1.0 / d, projector(basis_vector(d, i))) for i in range(d)))
    e1 = Ensemble(tuple((1.0 / d, projector(u[:, i])) for i in range(d)))
    return e0, e1


def flower_purification_general(d: int, unitaries: Sequence[np.ndarray]) -> PureState:
    """Purification on ``(A, A', B, B', C)`` with dims ``(d, 2m, d, 2m, d)``.

    ``A'`` and ``B'`` carry the pair ``(j, k)`` as ``j * m + k``; the purifier
    ``C`` holds ``V_k U_j |i>`` with ``U_0 = 1`` and ``U_1`` the Fourier
    transform.
    """
    if d < 2:
        raise BadShape("flower states need d >= 2")
    vs = [np.asarray(v, dtype=complex) for v in unitaries]
    if not vs:
        raise BadShape("need at least one unitary")
    for v in vs:
        if v.shape != (d, d) or not linalg.is_isometry(v, 1e-9):
            raise BadShape("every V_k must be a d x d unitary")
    m = len(vs)
    us = (np.eye(d, dtype=complex), fourier_unitary(d))
    dims = (d, 2 * m, d, 2 * m, d)
    psi = np.zeros(dims, dtype=complex)
    for j in range(2):
        for k, v in enumerate(vs):
            cols = v @ us[j]
            for i in range(d):
                psi[i, j * m + k, i, j * m + k, :] = cols[:, i]
    psi /= np.sqrt(2 * d * m)
    return PureState(psi.reshape(-1), dims, purifying_factor=4)


def flower_purification(d: int) -> PureState:
    """``(1/sqrt(2d)) sum_ij |i>|j>|i>|j> U_j|i>`` on ``(A, A', B, B', C)``."""
    return flower_purification_general(d, [np.eye(d)])


def flower_state(d: int, unitaries: Sequence[np.ndarray] | None = None) -> DensityOperator:
    """The flower state on ``(A, A', B, B')``."""
    psi = flower_purification(d) if unitaries is None else flower_purification_general(d, unitaries)
    return psi.reduced()


def sym_antisym_projectors(d: int) -> tuple[np.ndarray, np.ndarray]:
    if d < 2:
        raise BadShape("need d >= 2")
    f = linalg.swap_operator(d)
    eye = np.eye(d * d)
    return (eye + f) / 2, (eye - f) / 2


def omega_state(d: int) -> DensityOperator:
    """Flagged mixture of normalized symmetric/antisymmetric projectors on ``(A', A, B)``."""
    p_sym, p_anti = sym_antisym_projectors(d)
    flag0 = np.diag([1.0, 0.0])
    flag1 = np.diag([0.0, 1.0])
    mat = (d + 1) / (2 * d) * np.kron(flag0, 2 * p_sym / (d * (d + 1))) + (
        d - 1
    ) / (2 * d) * np.kron(flag1, 2 * p_anti / (d * (d - 1)))
    return DensityOperator(mat, (2, d, d))


def random_supported_state(proj: np.ndarray, rank: int, rng=None, dims=None) -> DensityOperator:
    """Random mixture of ``rank`` Haar vectors inside the range of ``proj``.

    Mixing weights are uniform on the simplex (flat Dirichlet).
    """
    proj = np.asarray(proj, dtype=complex)
    if not linalg.is_hermitian(proj, 1e-10) or np.max(np.abs(proj @ proj - proj)) > 1e-10:
        raise BadShape("argument is not an orthogonal projector")
    n = proj.shape[0]
    if dims is None:
        d = int(round(np.sqrt(n)))
        dims = (d, d) if d * d == n else (n,)
    vals, vecs = linalg.hermitian_eig(proj)
    basis = vecs[:, vals > 0.5]
    if rank < 1 or rank > basis.shape[1]:
        raise RankTooLarge(f"rank {rank} exceeds projector rank {basis.shape[1]}")
    rng = linalg.default_rng(rng)
    k = basis.shape[1]
    coeffs = rng.standard_normal((k, rank)) + 1j * rng.standard_normal((k, rank))
    coeffs /= np.linalg.norm(coeffs, axis=0)
    vecs = basis @ coeffs
    weights = rng.dirichlet(np.ones(rank))
    mat = (vecs * weights) @ vecs.conj().T
    mat = 0.5 * (mat + mat.conj().T)
    return DensityOperator(mat / np.trace(mat).real, dims)


def random_density(d: int, rng=None, rank: int | None = None, dims=None) -> DensityOperator:
    """Random state from the induced measure (Ginibre ``G G^dagger``)."""
    rng = linalg.default_rng(rng)
    rank = d if rank is None else rank
    g = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    mat = g @ g.conj().T
    return DensityOperator(mat / np.trace(mat).real, dims or (d,), validate=False)


def random_pure(dims, rng=None) -> PureState:
    rng = linalg.default_rng(rng)
    n = int(np.prod(dims))
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return PureState(v / np.linalg.norm(v), tuple(dims))


def purify(rho: DensityOperator, tol: float = 1e-12) -> PureState:
    """Eigendecomposition purification; the purifier is appended as the last factor.

    The purifier dimension equals the number of eigenvalues above ``tol``.
    """
    vals, vecs = linalg.hermitian_eig(rho.mat)
    keep = vals > tol
    vals, vecs = vals[keep][::-1], vecs[:, keep][:, ::-1]
    r = len(vals)
    if r == 0:
        raise NotAState("state has no support")
    vec = (vecs * np.sqrt(vals)).reshape(-1)
    vec /= np.linalg.norm(vec)
    return PureState(vec, rho.dims + (r,), purifying_factor=len(rho.dims))
