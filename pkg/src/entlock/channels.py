"""CPTP maps in Kraus form."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import linalg
from .errors import BadShape, DimMismatch, NotIsometry
from .states import AbelianGroup, DensityOperator, PureState

COMPLETENESS_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class KrausChannel:
    """Channel ``rho -> sum_k K_k rho K_k^dagger`` with ``d_out x d_in`` Kraus operators."""

    kraus: tuple[np.ndarray, ...]
    d_in: int
    d_out: int

    def __post_init__(self):
        ks = tuple(np.asarray(k, dtype=complex) for k in self.kraus)
        if not ks:
            raise BadShape("a channel needs at least one Kraus operator")
        for k in ks:
            if k.shape != (self.d_out, self.d_in):
                raise BadShape(f"Kraus operator of shape {k.shape}, expected {(self.d_out, self.d_in)}")
        object.__setattr__(self, "kraus", ks)
        drift = np.max(np.abs(sum(k.conj().T @ k for k in ks) - np.eye(self.d_in)))
        if drift > COMPLETENESS_TOL:
            raise NotIsometry(f"Kraus operators are not complete (drift {drift:.2e})")

    @property
    def stacked(self) -> np.ndarray:
        return np.stack(self.kraus)

    def __call__(self, rho):
        return apply(self, rho)

    def compose(self, first: "KrausChannel") -> "KrausChannel":
        """The channel ``self o first``."""
        if first.d_out != self.d_in:
            raise DimMismatch("cannot compose channels with mismatched dimensions")
        return KrausChannel(
            tuple(a @ b for a in self.kraus for b in first.kraus), first.d_in, self.d_out
        )

    def isometry(self) -> np.ndarray:
        """Stinespring isometry ``V = sum_k K_k (x) |k>``, environment last."""
        n = len(self.kraus)
        return np.stack(self.kraus, axis=1).reshape(self.d_out * n, self.d_in)


def apply(ch: KrausChannel, rho: DensityOperator) -> DensityOperator:
    if rho.dim != ch.d_in:
        raise DimMismatch(f"channel expects dimension {ch.d_in}, state has {rho.dim}")
    ks = ch.stacked
    out = np.einsum("koi,ij,kpj->op", ks, rho.mat, ks.conj())
    dims = rho.dims if ch.d_out == ch.d_in else (ch.d_out,)
    return DensityOperator(out, dims, validate=False)


def apply_to_factor(ch: KrausChannel, state, factor: int) -> DensityOperator:
    """Apply ``ch`` to tensor factor ``factor``; the slot's dimension becomes ``d_out``."""
    if isinstance(state, PureState):
        state = state.density()
    dims = state.dims
    if not 0 <= factor < len(dims):
        raise DimMismatch(f"factor {factor} out of range for dims {dims}")
    if dims[factor] != ch.d_in:
        raise DimMismatch(f"factor {factor} has dimension {dims[factor]}, channel expects {ch.d_in}")
    left = int(np.prod(dims[:factor]))
    right = int(np.prod(dims[factor + 1:]))
    t = state.mat.reshape(left, ch.d_in, right, left, ch.d_in, right)
    ks = ch.stacked
    out = np.einsum("koi,lirmjs,kpj->lormps", ks, t, ks.conj(), optimize=True)
    n = left * ch.d_out * right
    new_dims = dims[:factor] + (ch.d_out,) + dims[factor + 1:]
    return DensityOperator(out.reshape(n, n), new_dims, validate=False)


def identity_channel(d: int) -> KrausChannel:
    return KrausChannel((np.eye(d),), d, d)


def unitary_channel(u: np.ndarray) -> KrausChannel:
    u = np.asarray(u)
    return KrausChannel((u,), u.shape[1], u.shape[0])


def depolarizing_channel(d: int) -> KrausChannel:
    """Completely depolarizing map, Kraus set ``{|i><j| / sqrt(d)}``."""
    ks = []
    for i in range(d):
        for j in range(d):
            k = np.zeros((d, d))
            k[i, j] = 1 / np.sqrt(d)
            ks.append(k)
    return KrausChannel(tuple(ks), d, d)


def replacement_channel(d_in: int, state: np.ndarray) -> KrausChannel:
    """Trace the input and prepare the pure state ``state`` (a vector)."""
    state = np.asarray(state, dtype=complex)
    state = state / np.linalg.norm(state)
    ks = tuple(np.outer(state, np.eye(d_in)[i]) for i in range(d_in))
    return KrausChannel(ks, d_in, state.shape[0])


def dephasing_channel(basis: np.ndarray) -> KrausChannel:
    """Complete projective measurement in the orthonormal columns of ``basis``."""
    basis = np.asarray(basis, dtype=complex)
    d = basis.shape[0]
    if basis.shape != (d, d) or not linalg.is_isometry(basis, 1e-9):
        raise BadShape("basis must be a unitary matrix")
    return KrausChannel(tuple(np.outer(b, b.conj()) for b in basis.T), d, d)


def channel_from_isometry(v: np.ndarray, d_out: int, d_env: int) -> KrausChannel:
    """Kraus operators ``K_e = (1 (x) <e|) V`` of a Stinespring isometry.

    ``v`` maps ``d_in`` into ``d_out * d_env`` with the environment factor last.
    """
    v = np.asarray(v, dtype=complex)
    if v.ndim != 2 or v.shape[0] != d_out * d_env:
        raise BadShape(f"isometry has {v.shape[0]} rows, expected {d_out * d_env}")
    if not linalg.is_isometry(v, COMPLETENESS_TOL):
        raise NotIsometry("V^dagger V is not the identity")
    d_in = v.shape[1]
    t = v.reshape(d_out, d_env, d_in)
    return KrausChannel(tuple(t[:, e, :] for e in range(d_env)), d_in, d_out)


def random_channel(d_in: int, d_out: int, d_env: int, rng=None) -> KrausChannel:
    """Channel from a Haar-random Stinespring isometry; Kraus rank at most ``d_env``."""
    if d_out * d_env < d_in:
        raise BadShape("d_out * d_env must be at least d_in")
    v = linalg.haar_isometry(d_in, d_out * d_env, rng)
    return channel_from_isometry(v, d_out, d_env)


def weyl_twist(state: DensityOperator, a: int, b: int, group: AbelianGroup | None = None) -> DensityOperator:
    """Conjugate the first factor by ``X^a Z^b``."""
    d = state.dims[0]
    group = group or AbelianGroup.cyclic(d)
    if group.d != d:
        raise DimMismatch(f"group acts on dimension {group.d}, first factor has {d}")
    w = group.shift(a) @ group.phase(b)
    rest = state.dim // d
    op = np.kron(w, np.eye(rest))
    return DensityOperator(op @ state.mat @ op.conj().T, state.dims, validate=False)


def twirl_average(phi: np.ndarray, ops: Sequence[np.ndarray]) -> np.ndarray:
    """``(1/n) sum_g W_g phi W_g^dagger`` over the given unitaries."""
    return sum(w @ phi @ w.conj().T for w in ops) / len(ops)


def choi_state(ch: KrausChannel) -> DensityOperator:
    """``(id (x) ch)`` applied to the maximally entangled state on ``d_in x d_in``."""
    d = ch.d_in
    phi = np.eye(d).reshape(-1) / np.sqrt(d)
    rho = DensityOperator(np.outer(phi, phi), (d, d), validate=False)
    return apply_to_factor(ch, rho, 1)


def dilate(ch: KrausChannel, psi: PureState, factor: int) -> PureState:
    """Apply ``ch`` to one factor of a pure state, keeping its environment.

    The result is pure: the output replaces ``factor`` and the Stinespring
    environment (dimension = number of Kraus operators) is appended last.
    """
    dims = psi.dims
    if not 0 <= factor < len(dims):
        raise DimMismatch(f"factor {factor} out of range for dims {dims}")
    if dims[factor] != ch.d_in:
        raise DimMismatch(f"factor {factor} has dimension {dims[factor]}, channel expects {ch.d_in}")
    n = len(ch.kraus)
    left = int(np.prod(dims[:factor]))
    right = int(np.prod(dims[factor + 1:]))
    v = ch.isometry().reshape(ch.d_out, n, ch.d_in)
    out = np.einsum("oki,lir->lork", v, psi.vec.reshape(left, ch.d_in, right))
    new_dims = dims[:factor] + (ch.d_out,) + dims[factor + 1:] + (n,)
    return PureState(out.reshape(-1), new_dims)
