"""Correlation measures defined by optimizations over extensions or measurements.

Extensions of a state ``rho`` are generated by channels ``C -> E`` acting on a
purifier ``C`` of ``rho``. A channel is represented by its Stinespring
isometry ``V: C -> E (x) F`` (``F`` the discarded environment), which is the
variable of the local search in :mod:`entlock.optimize`. Results of these
searches are bounds: squashed entanglement and entanglement of purification
from above, accessible information from below.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import entropy as ent
from . import linalg
from .channels import KrausChannel, apply_to_factor, channel_from_isometry
from .errors import BadShape, DimMismatch
from .optimize import OptConfig, OptReport, multistart
from .states import DensityOperator, Ensemble, PureState, flower_purification_general, purify

GRAD_EIG_FLOOR = 1e-16


@dataclass(frozen=True, eq=False)
class Povm:
    """Positive effects summing to the identity."""

    effects: tuple[np.ndarray, ...]

    def __post_init__(self):
        effects = tuple(np.asarray(e, dtype=complex) for e in self.effects)
        if not effects:
            raise BadShape("a POVM needs at least one effect")
        d = effects[0].shape[0]
        for e in effects:
            if e.shape != (d, d) or not linalg.is_hermitian(e, 1e-8):
                raise BadShape("effects must be Hermitian d x d matrices")
            if linalg.eigvalsh(e)[0] < -1e-8:
                raise BadShape("effects must be positive semidefinite")
        if np.max(np.abs(sum(effects) - np.eye(d))) > 1e-8:
            raise BadShape("effects do not sum to the identity")
        object.__setattr__(self, "effects", effects)

    @property
    def dim(self) -> int:
        return self.effects[0].shape[0]

    @classmethod
    def from_operators(cls, ops: Sequence[np.ndarray]) -> "Povm":
        """Effects ``T^{-1/2} B_i^dagger B_i T^{-1/2}`` with ``T = sum_j B_j^dagger B_j``."""
        ops = [np.asarray(b, dtype=complex) for b in ops]
        t = sum(b.conj().T @ b for b in ops)
        vals, vecs = linalg.hermitian_eig(t)
        if vals[0] <= 0:
            raise BadShape("operators do not span the space (T is singular)")
        t_isqrt = (vecs / np.sqrt(vals)) @ vecs.conj().T
        return cls(tuple(t_isqrt @ b.conj().T @ b @ t_isqrt for b in ops))

    @classmethod
    def from_isometry(cls, w: np.ndarray, outcomes: int) -> "Povm":
        """Effects ``W^dagger (|y><y| (x) 1) W`` of an isometry into ``outcomes * r`` dims."""
        n_rows, d = w.shape
        blocks = w.reshape(outcomes, n_rows // outcomes, d)
        return cls(tuple(b.conj().T @ b for b in blocks))

    def probabilities(self, ens: Ensemble) -> np.ndarray:
        """Joint distribution ``P(x, y) = p_x Tr(E_y rho_x)``, shape (labels, outcomes)."""
        rhos = np.stack([s.mat for s in ens.states])
        cond = np.einsum("yij,xji->xy", np.stack(self.effects), rhos).real
        return ens.probs[:, None] * np.clip(cond, 0.0, None)


def classical_mutual_information(joint: np.ndarray) -> float:
    joint = np.asarray(joint, dtype=float)
    px = joint.sum(axis=1)
    py = joint.sum(axis=0)
    return ent.shannon(px) + ent.shannon(py) - ent.shannon(joint)


def povm_information(ens: Ensemble, povm: Povm) -> float:
    """Mutual information between the ensemble label and the measurement outcome."""
    return classical_mutual_information(povm.probabilities(ens))


# -- extension objectives ------------------------------------------------------

class ExtensionObjective:
    """Weighted sum of entropies of marginals of ``(id (x) Lambda) Psi``.

    ``psi`` is a purification with a designated purifying factor ``C``. For an
    isometry ``V: C -> E (x) F`` the global state on ``sys (x) E (x) F`` is
    pure. Each term is ``(coef, factors)`` where ``factors`` indexes the
    system factors of ``psi`` (purifier excluded, original order) and the
    label ``"E"`` stands for the extension.
    """

    def __init__(self, psi: PureState, terms, ext_dim: int, env_dim: int):
        if psi.purifying_factor is None:
            raise DimMismatch("need a purification with a designated purifying factor")
        c = psi.purifying_factor
        sys = [k for k in range(len(psi.dims)) if k != c]
        self.sys_dims = tuple(psi.dims[k] for k in sys)
        self.d_c = psi.dims[c]
        self.ext_dim = ext_dim
        self.env_dim = env_dim
        # Psi as a (sys, C) matrix
        self.psi_mat = linalg.permute_systems(psi.vec, psi.dims, sys + [c]).reshape(-1, self.d_c)
        n = len(self.sys_dims)
        self.global_dims = self.sys_dims + (ext_dim, env_dim)
        self.terms = []
        for coef, factors in terms:
            idx = sorted(n if f == "E" else int(f) for f in factors)
            if any(i < 0 or i > n for i in idx):
                raise DimMismatch(f"term factors {factors} out of range")
            # for a pure global state, use whichever side is smaller
            rest = [k for k in range(n + 2) if k not in idx]
            size = int(np.prod([self.global_dims[k] for k in idx]))
            rsize = int(np.prod([self.global_dims[k] for k in rest]))
            self.terms.append((float(coef), idx if size <= rsize else rest))

    @property
    def n_rows(self) -> int:
        return self.ext_dim * self.env_dim

    def global_vector(self, v: np.ndarray) -> np.ndarray:
        return (self.psi_mat @ v.T).reshape(-1)

    def value(self, v: np.ndarray) -> float:
        phi = self.global_vector(v)
        total = 0.0
        for coef, idx in self.terms:
            if idx:
                rho = linalg.reduced_from_vector(phi, self.global_dims, idx)
                total += coef * ent.spectrum_entropy(linalg.eigvalsh(rho))
        return total

    def __call__(self, v: np.ndarray) -> tuple[float, np.ndarray]:
        dims = self.global_dims
        nfac = len(dims)
        phi_t = self.global_vector(v).reshape(dims)
        total = 0.0
        grad_phi = np.zeros_like(phi_t)
        for coef, idx in self.terms:
            if not idx:
                continue
            rest = [k for k in range(nfac) if k not in idx]
            order = idx + rest
            dk = int(np.prod([dims[k] for k in idx]))
            m = phi_t.transpose(order).reshape(dk, -1)
            vals, vecs = np.linalg.eigh(m @ m.conj().T)
            total += coef * ent.spectrum_entropy(np.clip(vals, 0.0, None))
            logs = np.log2(np.maximum(vals, GRAD_EIG_FLOOR))
            g = -((vecs * logs) @ (vecs.conj().T @ m))
            g = g.reshape([dims[k] for k in order]).transpose(linalg.inverse_permutation(order))
            grad_phi += coef * g
        grad_phi = grad_phi.reshape(self.psi_mat.shape[0], -1)
        grad_v = grad_phi.T @ self.psi_mat.conj()
        return total, grad_v

    def channel(self, v: np.ndarray) -> KrausChannel:
        return channel_from_isometry(v, self.ext_dim, self.env_dim)

    def trivial_isometry(self) -> np.ndarray | None:
        """``|c> -> |0>_E |c>_F``: the extension that leaves ``E`` uncorrelated."""
        if self.env_dim < self.d_c:
            return None
        v = np.zeros((self.ext_dim, self.env_dim, self.d_c), dtype=complex)
        v[0, : self.d_c, :] = np.eye(self.d_c)
        return v.reshape(self.n_rows, self.d_c)

    def copy_isometry(self) -> np.ndarray | None:
        """``|c> -> |c>_E |0>_F``: the whole purifier handed to ``E``."""
        if self.ext_dim < self.d_c:
            return None
        v = np.zeros((self.ext_dim, self.env_dim, self.d_c), dtype=complex)
        v[: self.d_c, 0, :] = np.eye(self.d_c)
        return v.reshape(self.n_rows, self.d_c)


def _restrict(rho: DensityOperator, cut_a, cut_b) -> tuple[DensityOperator, list[int], list[int]]:
    """Trace out factors outside ``cut_a | cut_b`` and relabel the cuts."""
    cut_a, cut_b = sorted(set(cut_a)), sorted(set(cut_b))
    if not cut_a or not cut_b or set(cut_a) & set(cut_b):
        raise DimMismatch("the two sides of the cut must be nonempty and disjoint")
    keep = sorted(set(cut_a) | set(cut_b))
    if keep[0] < 0 or keep[-1] >= len(rho.dims):
        raise DimMismatch(f"cut {cut_a}|{cut_b} out of range for dims {rho.dims}")
    if len(keep) < len(rho.dims):
        rho = rho.marginal(keep)
    pos = {k: i for i, k in enumerate(keep)}
    return rho, [pos[k] for k in cut_a], [pos[k] for k in cut_b]


def _initial_factory(obj: ExtensionObjective, seeds: list[np.ndarray]):
    def initial(index, rng):
        if index < len(seeds):
            return seeds[index]
        return linalg.haar_isometry(obj.d_c, obj.n_rows, rng)

    return initial


def squashed_objective(rho: DensityOperator, cut_a, cut_b, env_dim: int, d_env: int | None = None):
    rho, a, b = _restrict(rho, cut_a, cut_b)
    psi = purify(rho)
    d_env = psi.dims[-1] if d_env is None else d_env
    terms = [(0.5, a + ["E"]), (0.5, b + ["E"]), (-0.5, ["E"]), (-0.5, a + b + ["E"])]
    return ExtensionObjective(psi, terms, env_dim, d_env)


def squashed_upper_bound(
    rho: DensityOperator,
    cut_a,
    cut_b,
    env_dim: int,
    cfg: OptConfig | None = None,
    d_env: int | None = None,
) -> OptReport:
    """Minimize ``I(A;B|E) / 2`` over channel extensions with ``dim E = env_dim``.

    The result upper-bounds the squashed entanglement. Restart 0 starts from the
    trivial extension, so the value never exceeds ``I(A;B) / 2``.
    """
    if env_dim < 1:
        raise BadShape("env_dim must be >= 1")
    cfg = cfg or OptConfig()
    obj = squashed_objective(rho, cut_a, cut_b, env_dim, d_env)
    seeds = [v for v in (obj.trivial_isometry(),) if v is not None]
    report = multistart(obj, _initial_factory(obj, seeds), cfg, kind="squashed_upper_bound")
    report.meta.update({"env_dim": env_dim, "d_env": obj.env_dim, "purifier_dim": obj.d_c})
    return report


class MeasurementObjective:
    """Restriction of an extension objective to measurements on the purifier.

    A POVM with ``outcomes`` effects is given by an isometry
    ``W: C -> Y (x) R``; the copy ``|y, k> -> |y>_E |y, k>_F`` turns it into a
    Stinespring isometry whose ``E`` output is classical.
    """

    def __init__(self, base: ExtensionObjective, outcomes: int):
        rank = base.env_dim // outcomes
        if base.ext_dim != outcomes or rank * outcomes != base.env_dim:
            raise BadShape("base objective must have dim E = outcomes and dim F = outcomes * rank")
        self.base, self.outcomes, self.rank = base, outcomes, rank
        self.d_c = base.d_c
        self.n_rows = outcomes * rank
        copy = np.zeros((outcomes, outcomes * rank, outcomes * rank))
        for y in range(outcomes):
            for k in range(rank):
                copy[y, y * rank + k, y * rank + k] = 1.0
        self.copy = copy.reshape(base.n_rows, self.n_rows)

    def value(self, w: np.ndarray) -> float:
        return self.base.value(self.copy @ w)

    def __call__(self, w: np.ndarray) -> tuple[float, np.ndarray]:
        val, grad = self.base(self.copy @ w)
        return val, self.copy.T @ grad

    def povm(self, w: np.ndarray) -> Povm:
        return Povm.from_isometry(w, self.outcomes)


def squashed_measurement_bound(
    rho: DensityOperator,
    cut_a,
    cut_b,
    outcomes: int,
    cfg: OptConfig | None = None,
) -> OptReport:
    """Minimize ``I(A;B|Y) / 2`` over POVMs on the purifier with ``outcomes`` results.

    Measurement extensions are a subset of channel extensions, so this is an
    upper bound on the channel-extension value and on squashed entanglement.
    Restart 0 is the computational-basis measurement when ``outcomes >= dim C``.
    """
    if outcomes < 1:
        raise BadShape("need at least one outcome")
    cfg = cfg or OptConfig()
    restricted, a, b = _restrict(rho, cut_a, cut_b)
    d_c = purify(restricted).dims[-1]
    obj = MeasurementObjective(squashed_objective(restricted, a, b, outcomes, outcomes * d_c), outcomes)
    seeds = []
    if outcomes >= d_c:
        w = np.zeros((outcomes, d_c, d_c), dtype=complex)
        for c in range(d_c):
            w[c, 0, c] = 1.0
        seeds.append(w.reshape(obj.n_rows, d_c))

    def initial(index, rng):
        if index < len(seeds):
            return seeds[index]
        return linalg.haar_isometry(d_c, obj.n_rows, rng)

    report = multistart(obj, initial, cfg, kind="squashed_measurement_bound")
    report.meta.update({"outcomes": outcomes, "purifier_dim": d_c})
    return report


def purification_objective(rho: DensityOperator, cut_a, cut_b, ext_dim: int, d_env: int | None = None):
    rho, a, _ = _restrict(rho, cut_a, cut_b)
    psi = purify(rho)
    d_env = psi.dims[-1] if d_env is None else d_env
    return ExtensionObjective(psi, [(1.0, a + ["E"])], ext_dim, d_env)


def entanglement_of_purification(
    rho: DensityOperator,
    cut_a,
    cut_b,
    ext_dim: int,
    cfg: OptConfig | None = None,
    d_env: int | None = None,
    start: np.ndarray | None = None,
) -> OptReport:
    """Minimize ``S(AE)`` over channel extensions with ``dim E = ext_dim``.

    Upper bound on the entanglement of purification. Seeds: ``start`` if given,
    then the trivial extension and the full purifier.
    """
    if ext_dim < 1:
        raise BadShape("ext_dim must be >= 1")
    cfg = cfg or OptConfig()
    restricted, a, b = _restrict(rho, cut_a, cut_b)
    if restricted.rank() == 1:
        vals, vecs = linalg.hermitian_eig(restricted.mat)
        psi = PureState(vecs[:, -1], restricted.dims)
        value = ent.entanglement_entropy(psi, a)
        return OptReport(
            value=value,
            best_params=np.ones((ext_dim, 1), dtype=complex) / np.sqrt(ext_dim),
            restarts=0,
            iterations=[],
            converged=True,
            history=[value],
            best_restart=0,
            kind="entanglement_of_purification",
            config=cfg,
            meta={"ext_dim": ext_dim, "pure": True},
        )
    obj = purification_objective(restricted, a, b, ext_dim, d_env)
    seeds = [v for v in (start, obj.trivial_isometry(), obj.copy_isometry()) if v is not None]
    report = multistart(obj, _initial_factory(obj, seeds), cfg, kind="entanglement_of_purification")
    report.meta.update({"ext_dim": ext_dim, "d_env": obj.env_dim, "purifier_dim": obj.d_c})
    return report


def _embed_extension(v: np.ndarray, ext_from: int, ext_to: int, env_dim: int) -> np.ndarray:
    """Reinterpret an isometry into ``ext_from`` as one into the larger ``ext_to``."""
    d_c = v.shape[1]
    out = np.zeros((ext_to, env_dim, d_c), dtype=complex)
    out[:ext_from] = v.reshape(ext_from, env_dim, d_c)
    return out.reshape(ext_to * env_dim, d_c)


def ep_series(rho: DensityOperator, cut_a, cut_b, cap: int, cfg: OptConfig | None = None) -> list[OptReport]:
    """Entanglement-of-purification bounds for ``ext_dim = 1..cap``.

    Each search is warm-started from the previous optimum, so the series is
    non-increasing.
    """
    reports: list[OptReport] = []
    start = None
    for k in range(1, cap + 1):
        rep = entanglement_of_purification(rho, cut_a, cut_b, k, cfg, start=start)
        if rep.restarts and reports:
            rep.value = min(rep.value, reports[-1].value)
        reports.append(rep)
        if rep.restarts:
            env = rep.meta["d_env"]
            start = _embed_extension(rep.best_params, k, k + 1, env)
    return reports


def cmi_for_extension(state, channel: KrausChannel, cut_a, cut_b) -> float:
    """``I(A;B|E) / 2`` for the extension obtained by ``channel`` on the purifier.

    ``state`` is either a :class:`PureState` with a purifying factor (the
    channel acts on that factor) or a :class:`DensityOperator`, which is
    purified first.
    """
    if isinstance(state, DensityOperator):
        restricted, a, b = _restrict(state, cut_a, cut_b)
        psi = purify(restricted)
    else:
        psi, a, b = state, sorted(set(cut_a)), sorted(set(cut_b))
        if psi.purifying_factor is None:
            raise DimMismatch("pure state needs a designated purifying factor")
    c = psi.purifying_factor
    if channel.d_in != psi.dims[c]:
        raise DimMismatch(f"channel input {channel.d_in} != purifier dimension {psi.dims[c]}")
    ext = apply_to_factor(channel, psi, c)
    sys = [k for k in range(len(psi.dims)) if k != c]
    if set(a) & {c} or set(b) & {c}:
        raise DimMismatch("the purifying factor cannot be part of the cut")
    # the remaining system factors not in the cut are traced out
    keep = sorted(set(a) | set(b) | {c})
    if len(keep) < len(sys) + 1:
        ext = ext.marginal(keep)
        pos = {k: i for i, k in enumerate(keep)}
        a, b, c = [pos[k] for k in a], [pos[k] for k in b], pos[c]
    return 0.5 * ent.conditional_mutual_information(ext, a, b, [c])


# -- accessible information -----------------------------------------------------

class PovmObjective:
    """Classical mutual information of an ensemble under the POVM of an isometry."""

    def __init__(self, ens: Ensemble, outcomes: int, rank: int | None = None):
        self.probs = ens.probs
        self.rhos = np.stack([s.mat for s in ens.states])
        self.d = self.rhos.shape[1]
        self.outcomes = outcomes
        self.rank = self.d if rank is None else rank

    def __call__(self, w: np.ndarray) -> tuple[float, np.ndarray]:
        n, r, d = self.outcomes, self.rank, self.d
        blocks = w.reshape(n, r, d)
        # cond[x, y] = Tr(W_y rho_x W_y^dagger)
        wr = np.einsum("yrd,xde->xyre", blocks, self.rhos)
        cond = np.einsum("xyre,yre->xy", wr, blocks.conj()).real
        cond = np.clip(cond, 0.0, None)
        joint = self.probs[:, None] * cond
        py = joint.sum(axis=0)
        value = classical_mutual_information(joint)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where((cond > 0) & (py[None, :] > 0), cond / py[None, :], 1.0)
        coef = self.probs[:, None] * np.log2(ratio)
        grad = np.einsum("xy,xyre->yre", coef, wr)
        return value, grad.reshape(n * r, d)


def accessible_information(ens: Ensemble, outcomes: int, cfg: OptConfig | None = None) -> OptReport:
    """Maximize ``I(X;Y)`` over POVMs with ``outcomes`` effects (lower bound on I_acc).

    Effects are parameterized as ``T^{-1/2} B_y^dagger B_y T^{-1/2}``; stacking
    the ``B_y`` and normalizing gives an isometry, which is the search variable.
    """
    if outcomes < 1:
        raise BadShape("need at least one outcome")
    cfg = cfg or OptConfig()
    obj = PovmObjective(ens, outcomes)
    n_rows = outcomes * obj.rank

    def initial(index, rng):
        bs = rng.standard_normal((n_rows, obj.d)) + 1j * rng.standard_normal((n_rows, obj.d))
        t = bs.conj().T @ bs
        vals, vecs = np.linalg.eigh(t)
        return bs @ (vecs / np.sqrt(vals)) @ vecs.conj().T

    report = multistart(obj, initial, cfg, kind="accessible_information", maximize=True)
    report.meta.update({"outcomes": outcomes, "rank": obj.rank})
    return report


def flower_ensemble(d: int, unitaries: Sequence[np.ndarray] | None = None) -> Ensemble:
    """Ensemble ``{1/(2dm), V_k U_j |i>}`` induced on the purifier of a flower state."""
    from .states import fourier_unitary, projector

    vs = [np.eye(d)] if unitaries is None else [np.asarray(v) for v in unitaries]
    us = (np.eye(d), fourier_unitary(d))
    m = len(vs)
    items = []
    for j in range(2):
        for v in vs:
            cols = v @ us[j]
            items.extend((1.0 / (2 * d * m), projector(cols[:, i])) for i in range(d))
    return Ensemble(tuple(items))


def ef_flower(
    d: int,
    unitaries: Sequence[np.ndarray] | None = None,
    cfg: OptConfig | None = None,
    outcomes: int | None = None,
) -> float:
    """Entanglement of formation of a flower state, ``S(A A') - I_acc``.

    ``I_acc`` is estimated from below, so the returned value is an upper bound
    whenever the POVM search is not tight.
    """
    vs = [np.eye(d)] if unitaries is None else list(unitaries)
    psi = flower_purification_general(d, vs)
    s_a = ent.subsystem_entropy(psi, [0, 1])
    rep = accessible_information(flower_ensemble(d, vs), outcomes or d * d, cfg)
    return s_a - rep.value


def ep_additivity_check(
    rho1: DensityOperator,
    rho2: DensityOperator,
    cfg: OptConfig | None = None,
    ext_dim: int | None = None,
) -> tuple[float, float, float]:
    """Purification bounds for two bipartite states and for their product.

    Each input has dims ``(a, b)``; in the product the A sides are grouped.
    ``ext_dim`` defaults to each state's purifier dimension.
    """
    for r in (rho1, rho2):
        if len(r.dims) != 2:
            raise DimMismatch("expected bipartite states on two factors")

    def estimate(rho, a, b):
        k = ext_dim or rho.rank()
        return entanglement_of_purification(rho, a, b, k, cfg).value

    prod = rho1.tensor(rho2)
    return (
        estimate(rho1, [0], [1]),
        estimate(rho2, [0], [1]),
        estimate(prod, [0, 2], [1, 3]),
    )


def instrument_branches(rho: DensityOperator, instrument, factor: int = 0):
    """Outcome probabilities and post-measurement states of a local instrument.

    ``instrument`` is a list of outcomes, each a list of Kraus operators
    acting on ``factor``.
    """
    d = rho.dims[factor]
    left = int(np.prod(rho.dims[:factor]))
    right = int(np.prod(rho.dims[factor + 1:]))
    total = sum(k.conj().T @ k for branch in instrument for k in branch)
    if np.max(np.abs(total - np.eye(d))) > 1e-9:
        raise BadShape("instrument operators are not complete")
    out = []
    for branch in instrument:
        mat = np.zeros_like(rho.mat)
        for k in branch:
            op = np.kron(np.kron(np.eye(left), k), np.eye(right))
            mat = mat + op @ rho.mat @ op.conj().T
        p = float(np.trace(mat).real)
        state = DensityOperator(mat / p, rho.dims, validate=False) if p > 1e-14 else None
        out.append((p, state))
    return out
