"""Entropic functionals, all in bits."""
from __future__ import annotations

import math
from typing import Iterable

import numpy as np

from . import linalg
from .channels import KrausChannel, apply, choi_state
from .errors import DimMismatch, NotAState
from .states import DensityOperator, Ensemble, PureState, maximally_mixed

NEG_TOL = 1e-10
SUPPORT_TOL = 1e-12
OUTSIDE_SUPPORT_TOL = 1e-9


def spectrum_entropy(vals: np.ndarray) -> float:
    """Shannon entropy of an eigenvalue list, clamping roundoff negatives."""
    vals = np.asarray(vals, dtype=float)
    if vals.size and vals.min() < -NEG_TOL:
        raise NotAState(f"eigenvalue {vals.min():.3e} is below -{NEG_TOL}")
    vals = np.clip(vals, 0.0, 1.0)
    vals = vals[vals > 0]
    return float(-np.sum(vals * np.log2(vals)))


def shannon(p) -> float:
    return spectrum_entropy(np.asarray(p, dtype=float).reshape(-1))


def entropy(rho) -> float:
    """Von Neumann entropy ``-Tr rho log2 rho``."""
    mat = rho.mat if isinstance(rho, DensityOperator) else np.asarray(rho)
    diag = np.diag(mat)
    if np.count_nonzero(mat) == np.count_nonzero(diag):
        # classical states skip the eigensolver
        return spectrum_entropy(diag.real)
    return spectrum_entropy(linalg.eigvalsh(mat))


def _as_state(state):
    if isinstance(state, (DensityOperator, PureState)):
        return state
    raise TypeError("expected a DensityOperator or PureState")


def subsystem_entropy(state, factors: Iterable[int]) -> float:
    """Entropy of the marginal on ``factors``; the empty set has entropy 0."""
    state = _as_state(state)
    factors = sorted(set(factors))
    if not factors:
        return 0.0
    if any(f < 0 or f >= len(state.dims) for f in factors):
        raise DimMismatch(f"factors {factors} out of range for dims {state.dims}")
    if len(factors) == len(state.dims):
        if isinstance(state, PureState):
            return 0.0
        return entropy(state)
    return entropy(state.marginal(factors))


def conditional_entropy(state, x: Iterable[int], y: Iterable[int]) -> float:
    """``S(X|Y) = S(XY) - S(Y)``."""
    x, y = set(x), set(y)
    return subsystem_entropy(state, x | y) - subsystem_entropy(state, y)


def _disjoint(*parts) -> list[set[int]]:
    sets = [set(p) for p in parts]
    total = sum(len(s) for s in sets)
    if len(set().union(*sets)) != total:
        raise DimMismatch("subsystem sets must be disjoint")
    return sets


def mutual_information(state, part_a: Iterable[int], part_b: Iterable[int]) -> float:
    a, b = _disjoint(part_a, part_b)
    return (
        subsystem_entropy(state, a)
        + subsystem_entropy(state, b)
        - subsystem_entropy(state, a | b)
    )


def conditional_mutual_information(state, part_a, part_b, part_e) -> float:
    """``I(A;B|E) = S(AE) + S(BE) - S(E) - S(ABE)``."""
    a, b, e = _disjoint(part_a, part_b, part_e)
    return (
        subsystem_entropy(state, a | e)
        + subsystem_entropy(state, b | e)
        - subsystem_entropy(state, e)
        - subsystem_entropy(state, a | b | e)
    )


def relative_entropy(rho, sigma) -> float:
    """``Tr rho (log2 rho - log2 sigma)``; ``math.inf`` if rho leaves sigma's support."""
    r = rho.mat if isinstance(rho, DensityOperator) else np.asarray(rho)
    s = sigma.mat if isinstance(sigma, DensityOperator) else np.asarray(sigma)
    if r.shape != s.shape:
        raise DimMismatch("relative entropy of operators of different dimension")
    svals, svecs = linalg.hermitian_eig(s)
    weights = np.einsum("ik,ij,jk->k", svecs.conj(), r, svecs).real
    supp = svals > SUPPORT_TOL
    if weights[~supp].sum() > OUTSIDE_SUPPORT_TOL:
        return math.inf
    cross = float(np.sum(weights[supp] * np.log2(svals[supp])))
    return -entropy(r) - cross


def holevo_chi(ens: Ensemble) -> float:
    """``S(sum_i p_i rho_i) - sum_i p_i S(rho_i)``."""
    avg = entropy(ens.average())
    return avg - float(sum(p * entropy(s) for p, s in ens.items))


def channel_output_ensemble(ch: KrausChannel, ens: Ensemble) -> Ensemble:
    return Ensemble(tuple((p, apply(ch, s)) for p, s in ens.items))


def channel_mutual_information(ch: KrausChannel, d: int | None = None) -> float:
    """``I(tau; ch) = S(tau) + S(ch(tau)) - S((id (x) ch) Phi_d)``."""
    d = ch.d_in if d is None else d
    if ch.d_in != d:
        raise DimMismatch(f"channel input dimension {ch.d_in} differs from d={d}")
    tau = maximally_mixed(d)
    return math.log2(d) + entropy(apply(ch, tau)) - entropy(choi_state(ch))


def coherent_information(ch: KrausChannel, d: int | None = None) -> float:
    """``S(ch(tau)) - S((id (x) ch) Phi_d)``."""
    d = ch.d_in if d is None else d
    if ch.d_in != d:
        raise DimMismatch(f"channel input dimension {ch.d_in} differs from d={d}")
    return entropy(apply(ch, maximally_mixed(d))) - entropy(choi_state(ch))


def entanglement_entropy(psi: PureState, cut: Iterable[int]) -> float:
    """Entropy of entanglement of a pure state across ``cut`` vs the rest."""
    cut = sorted(set(cut))
    if not cut or len(cut) >= len(psi.dims) or any(c < 0 or c >= len(psi.dims) for c in cut):
        raise DimMismatch(f"{cut} is not a proper bipartition of {len(psi.dims)} factors")
    # Schmidt coefficients via SVD avoids forming the larger marginal
    rest = [k for k in range(len(psi.dims)) if k not in cut]
    dk = int(np.prod([psi.dims[k] for k in cut]))
    m = psi.vec.reshape(psi.dims).transpose(cut + rest).reshape(dk, -1)
    s = np.linalg.svd(m, compute_uv=False)
    return spectrum_entropy(s**2)
