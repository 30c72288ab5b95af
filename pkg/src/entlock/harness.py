"""Seeded random sweeps checking the channel uncertainty relation and its consequences.

Every ``verify_*`` function returns a :class:`SweepReport`. A sample violates
the property when its slack is below ``-VIOLATION_TOL`` or when one of the
exact identities checked alongside it is off by more than ``IDENTITY_TOL``.
The ``worst_case`` payload holds the serialized inputs of the sample with the
smallest slack; :func:`replay` recomputes that slack from the payload alone.
"""
from __future__ import annotations

import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.linalg import expm

from . import entropy as ent
from . import linalg
from .channels import (
    KrausChannel,
    apply,
    apply_to_factor,
    channel_from_isometry,
    choi_state,
    dephasing_channel,
    dilate,
    random_channel,
    weyl_twist,
)
from .measures import (
    entanglement_of_purification,
    instrument_branches,
    purification_objective,
)
from .optimize import OptConfig
from .serialize import (
    channel_from_dict,
    channel_to_dict,
    matrix_from_dict,
    matrix_to_dict,
    state_from_dict,
    state_to_dict,
)
from .states import (
    AbelianGroup,
    DensityOperator,
    basis_ensembles,
    flower_purification,
    flower_purification_general,
    maximally_mixed,
    omega_state,
    purify,
    random_density,
    random_supported_state,
    sym_antisym_projectors,
)

VIOLATION_TOL = 1e-8
IDENTITY_TOL = 1e-9


@dataclass
class SweepReport:
    property: str
    params: dict
    samples: int
    violations: int
    min_slack: float | None
    worst_case: dict | None
    seed: int
    wallclock_ms: float | None = None
    checks: dict = field(default_factory=dict)
    breakdown: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def to_dict(self) -> dict:
        return {
            "property": self.property,
            "params": self.params,
            "samples": self.samples,
            "violations": self.violations,
            "min_slack": self.min_slack,
            "worst_case": self.worst_case,
            "seed": self.seed,
            "wallclock_ms": self.wallclock_ms,
            "checks": self.checks,
            "breakdown": self.breakdown,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


class _Sweep:
    """Accumulates slacks and identity errors into a report."""

    def __init__(self, prop: str, params: dict, seed: int, timed: bool):
        self.prop, self.params, self.seed = prop, params, seed
        self.samples = self.violations = 0
        self.min_slack: float | None = None
        self.worst: dict | None = None
        self.checks: dict[str, float] = {}
        self.breakdown: dict[str, dict] = {}
        self.t0 = time.perf_counter() if timed else None

    def record(self, slack: float, inputs: Callable[[], dict], identities=None, group: str | None = None):
        self.samples += 1
        bad = slack < -VIOLATION_TOL
        for name, err in (identities or {}).items():
            err = abs(err)
            self.checks[name] = max(self.checks.get(name, 0.0), err)
            bad |= err > IDENTITY_TOL
        self.violations += bad
        if self.min_slack is None or slack < self.min_slack:
            self.min_slack = slack
            self.worst = inputs()
        if group is not None:
            b = self.breakdown.setdefault(group, {"samples": 0, "violations": 0, "min_slack": None})
            b["samples"] += 1
            b["violations"] += int(bad)
            if b["min_slack"] is None or slack < b["min_slack"]:
                b["min_slack"] = slack

    def fail(self, name: str, err: float, tol: float):
        """Record a one-off check that is not tied to a sample."""
        self.checks[name] = max(self.checks.get(name, 0.0), abs(err))
        if abs(err) > tol:
            self.violations += 1

    def report(self) -> SweepReport:
        ms = None if self.t0 is None else round(1000 * (time.perf_counter() - self.t0), 3)
        return SweepReport(
            self.prop, self.params, self.samples, self.violations, self.min_slack,
            self.worst, self.seed, ms, self.checks, self.breakdown,
        )


def _rng(seed: int, *keys: int) -> np.random.Generator:
    return np.random.default_rng([seed, *keys])


def _map(fn, items, threads: int = 1):
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, items))
    return [fn(i) for i in items]


def _group(d: int, group: str) -> AbelianGroup:
    return AbelianGroup(group, d)


# -- per-sample quantities -------------------------------------------------------

def lemma1_terms(ch: KrausChannel, group: AbelianGroup) -> dict:
    """Holevo quantities of both basis ensembles and the channel mutual information."""
    e0, e1 = basis_ensembles(group.d, group.fourier())
    chi0 = ent.holevo_chi(ent.channel_output_ensemble(ch, e0))
    chi1 = ent.holevo_chi(ent.channel_output_ensemble(ch, e1))
    info = ent.channel_mutual_information(ch, group.d)
    return {"chi0": chi0, "chi1": chi1, "info": info, "slack": info - chi0 - chi1}


def _dephased(rho: DensityOperator, basis: np.ndarray) -> DensityOperator:
    return apply_to_factor(dephasing_channel(basis), rho, 0)


def relent_terms(ch: KrausChannel, group: AbelianGroup) -> dict:
    """The three relative entropies to ``tau (x) ch(tau)``."""
    d = group.d
    rho = choi_state(ch)
    ref = maximally_mixed(d).tensor(apply(ch, maximally_mixed(d)))
    d_full = ent.relative_entropy(rho, ref)
    d0 = ent.relative_entropy(_dephased(rho, np.eye(d)), ref)
    d1 = ent.relative_entropy(_dephased(rho, group.fourier()), ref)
    return {"D": d_full, "D0": d0, "D1": d1, "slack": d_full - d0 - d1}


def omega_cq_state(ch: KrausChannel, group: AbelianGroup) -> DensityOperator:
    """``(1/d^2) sum_ab |a><a| (x) |b><b| (x) rho_ab`` on dims ``(d, d, d, d_out)``."""
    d = group.d
    rho = choi_state(ch)
    n = rho.dim
    mat = np.zeros((d * d * n, d * d * n), dtype=complex)
    for a in group.elements():
        for b in group.elements():
            blk = (a * d + b) * n
            mat[blk:blk + n, blk:blk + n] = weyl_twist(rho, a, b, group).mat / d**2
    return DensityOperator(mat, (d, d) + rho.dims, validate=False)


def omega_terms(ch: KrausChannel, group: AbelianGroup) -> dict:
    omega = omega_cq_state(ch, group)
    a, b, c = [0], [1], [2, 3]
    return {
        "I(AB;C)": ent.mutual_information(omega, a + b, c),
        "I(A;C)": ent.mutual_information(omega, a, c),
        "I(B;C)": ent.mutual_information(omega, b, c),
        "I(B;C|A)": ent.conditional_mutual_information(omega, b, c, a),
        "I(B;AC)": ent.mutual_information(omega, b, a + c),
        "I(A;B)": ent.mutual_information(omega, a, b),
    }


def flower_extension_terms(ch: KrausChannel, d: int, unitaries=None) -> dict:
    """Entropies of ``(id (x) ch) Psi`` for a flower purification ``Psi``."""
    psi = flower_purification(d) if unitaries is None else flower_purification_general(d, unitaries)
    ext = dilate(ch, psi, 4)  # factors A, A', B, B', E, F
    s = {
        "AA'E": ent.subsystem_entropy(ext, [0, 1, 4]),
        "BB'E": ent.subsystem_entropy(ext, [2, 3, 4]),
        "E": ent.subsystem_entropy(ext, [4]),
        "AA'BB'E": ent.subsystem_entropy(ext, [0, 1, 2, 3, 4]),
    }
    s["cmi"] = s["AA'E"] + s["BB'E"] - s["E"] - s["AA'BB'E"]
    return s


def prop1_terms(ch: KrausChannel, d: int) -> dict:
    s = flower_extension_terms(ch, d)
    l1 = lemma1_terms(ch, AbelianGroup.cyclic(d))
    log_d = math.log2(d)
    tau_out = ent.entropy(apply(ch, maximally_mixed(d)))
    s_ae = 1 + log_d + tau_out - 0.5 * l1["chi0"] - 0.5 * l1["chi1"]
    return {
        **s,
        "slack": 0.5 * s["cmi"] - (1 + 0.5 * log_d),
        "identities": {
            "identity chain": s["cmi"] - (2 + log_d + l1["info"] - l1["chi0"] - l1["chi1"]),
            "S(E) = S(ch(tau))": s["E"] - tau_out,
            "S(AA'BB'E) = S(choi)": s["AA'BB'E"] - ent.entropy(choi_state(ch)),
            "S(AA'E)": s["AA'E"] - s_ae,
            "S(BB'E)": s["BB'E"] - s_ae,
        },
    }


def prop2_terms(ch: KrausChannel, d: int, unitaries: Sequence[np.ndarray]) -> dict:
    m = len(unitaries)
    s = flower_extension_terms(ch, d, unitaries)
    target = 0.5 * math.log2(d) + math.log2(m) + 1
    info = ent.channel_mutual_information(ch, d)
    chi_sum = 0.0
    for v in unitaries:
        for u in (np.eye(d), AbelianGroup.cyclic(d).fourier()):
            _, ens = basis_ensembles(d, v @ u)
            chi_sum += ent.holevo_chi(ent.channel_output_ensemble(ch, ens))
    chain = 2 + math.log2(d) + 2 * math.log2(m) + info - chi_sum / m
    return {**s, "slack": 0.5 * s["cmi"] - target, "identities": {"identity chain": s["cmi"] - chain}}


def prop3_terms(rho: DensityOperator, ch: KrausChannel) -> dict:
    """Entropic quantities of the extension of ``rho`` by ``ch`` on its purifier."""
    psi = purify(rho)
    ext = apply_to_factor(ch, psi, 2)  # factors A, B, E
    s_a = ent.subsystem_entropy(ext, [0])
    s_ae = ent.subsystem_entropy(ext, [0, 2])
    d = rho.dims[0]
    flip = np.kron(linalg.swap_operator(d), np.eye(ch.d_out))
    sym_err = float(np.max(np.abs(flip @ ext.mat @ flip.T - ext.mat)))
    return {
        "slack": s_ae - s_a,
        "identities": {
            "S(E|A) = S(E|B)": ent.conditional_entropy(ext, [2], [0]) - ent.conditional_entropy(ext, [2], [1]),
            "exchange symmetry": sym_err,
        },
    }


def coherent_terms(ch: KrausChannel, group: AbelianGroup) -> dict:
    l1 = lemma1_terms(ch, group)
    log_d = math.log2(group.d)
    icoh = ent.coherent_information(ch, group.d)
    eps = log_d - min(l1["chi0"], l1["chi1"])
    eps_sum = (log_d - l1["chi0"]) + (log_d - l1["chi1"])
    return {
        "icoh": icoh,
        "eps": eps,
        "eps_sum": eps_sum,
        "slack": icoh - (log_d - eps_sum),
        "loose_slack": icoh - (log_d - 2 * eps),
        "identities": {"I_coh = I(tau;ch) - log d": icoh - (l1["info"] - log_d)},
    }


def uncertainty_terms(rho: DensityOperator, u: np.ndarray) -> dict:
    d = rho.dim
    s0 = ent.shannon(np.diag(rho.mat).real)
    s1 = ent.shannon(np.diag(u.conj().T @ rho.mat @ u).real)
    return {"S0": s0, "S1": s1, "slack": s0 + s1 - math.log2(d)}


# -- sweeps ----------------------------------------------------------------------

def _channel_payload(ch: KrausChannel, **extra) -> Callable[[], dict]:
    return lambda: {"channel": channel_to_dict(ch), **extra}


def lemma1_slacks(d: int, samples: int, seed: int, group: str = "zd", d_out: int | None = None,
                  d_env: int | None = None, threads: int = 1) -> list[tuple[KrausChannel, dict]]:
    g = _group(d, group)
    d_out = d if d_out is None else d_out
    d_env = d if d_env is None else d_env

    def one(i):
        ch = random_channel(d, d_out, d_env, _rng(seed, i))
        return ch, lemma1_terms(ch, g)

    return _map(one, range(samples), threads)


def verify_lemma1(d: int, group: str = "zd", samples: int = 1000, d_out: int | None = None,
                  d_env: int | None = None, seed: int = 0, threads: int = 1, timed: bool = False) -> SweepReport:
    """``chi(ch(E_0)) + chi(ch(E_1)) <= I(tau; ch)`` over Haar-random channels."""
    d_out = d if d_out is None else d_out
    d_env = d if d_env is None else d_env
    sw = _Sweep("lemma1", {"d": d, "group": group, "d_out": d_out, "d_env": d_env}, seed, timed)
    conj = None
    if group == "zd":
        # the sign of the Fourier phase only relabels the conjugate basis
        _, conj = basis_ensembles(d, AbelianGroup.cyclic(d).fourier().conj())
    for ch, t in lemma1_slacks(d, samples, seed, group, d_out, d_env, threads):
        ident = None
        if conj is not None:
            ident = {"Fourier sign convention": ent.holevo_chi(ent.channel_output_ensemble(ch, conj)) - t["chi1"]}
        sw.record(t["slack"], _channel_payload(ch), ident)
    return sw.report()


def verify_lemma1_relent_form(d: int, samples: int = 1000, seed: int = 0, group: str = "zd",
                              threads: int = 1, timed: bool = False) -> SweepReport:
    """Relative-entropy form of the channel inequality and its equivalence to the Holevo form."""
    g = _group(d, group)
    sw = _Sweep("lemma1-relent", {"d": d, "group": group}, seed, timed)

    def one(i):
        ch = random_channel(d, d, d, _rng(seed, i))
        return ch, relent_terms(ch, g), lemma1_terms(ch, g)

    for ch, r, l1 in _map(one, range(samples), threads):
        sw.record(r["slack"], _channel_payload(ch), {
            "D(rho) = I(tau;ch)": r["D"] - l1["info"],
            "D(rho_0) = chi_0": r["D0"] - l1["chi0"],
            "D(rho_1) = chi_1": r["D1"] - l1["chi1"],
            "slack equivalence": r["slack"] - l1["slack"],
        })
    return sw.report()


def verify_omega_identities(d: int, samples: int = 1000, seed: int = 0, group: str = "zd",
                            threads: int = 1, timed: bool = False) -> SweepReport:
    """Mutual informations of the Weyl-twisted classical-quantum state."""
    g = _group(d, group)
    sw = _Sweep("omega", {"d": d, "group": group}, seed, timed)

    def one(i):
        ch = random_channel(d, d, d, _rng(seed, i))
        return ch, omega_terms(ch, g), relent_terms(ch, g)

    for ch, o, r in _map(one, range(samples), threads):
        slack = o["I(AB;C)"] - o["I(A;C)"] - o["I(B;C)"]
        sw.record(slack, _channel_payload(ch), {
            "D(rho) = I(AB;C)": r["D"] - o["I(AB;C)"],
            "D(rho_0) = I(A;C)": r["D0"] - o["I(A;C)"],
            "D(rho_1) = I(B;C)": r["D1"] - o["I(B;C)"],
            "I(AB;C) = I(A;C) + I(B;AC)": o["I(AB;C)"] - o["I(A;C)"] - o["I(B;AC)"],
            "I(B;AC) = I(B;C|A)": o["I(B;AC)"] - o["I(B;C|A)"],
            "I(A;B) = 0": o["I(A;B)"],
        })
    return sw.report()


def classical_flag_extension(d: int) -> DensityOperator:
    """Extension of the flower marginal on ``(A, B, B')`` by a classical copy of ``(i, j)``.

    Factors ``(A, B, B', E)`` with ``dim E = 2d``; conditioned on ``E`` the
    state is a product, so the conditional mutual information vanishes.
    """
    n = d * d * 2 * 2 * d
    diag = np.zeros(n)
    for i in range(d):
        for j in range(2):
            idx = np.ravel_multi_index((i, i, j, i * 2 + j), (d, d, 2, 2 * d))
            diag[idx] = 1 / (2 * d)
    return DensityOperator(np.diag(diag).astype(complex), (d, d, 2, 2 * d), validate=False)


def verify_prop1(d: int, samples: int = 1000, env_dims: Sequence[int] = (1, 2, 4), seed: int = 0,
                 d_env: int | None = None, threads: int = 1, timed: bool = False) -> SweepReport:
    """Squashed-entanglement lower bound for the flower state over random extensions."""
    env_dims = [int(e) for e in env_dims]
    d_env = d if d_env is None else d_env
    sw = _Sweep("prop1", {"d": d, "env_dims": env_dims, "d_env": d_env}, seed, timed)
    target = 1 + 0.5 * math.log2(d)
    psi = flower_purification(d)
    rho = psi.reduced()
    # trivial extension: E carries nothing, so CMI reduces to I(AA';BB')
    sw.fail("trivial extension", 0.5 * ent.mutual_information(rho, [0, 1], [2, 3]) - target, 1e-10)
    # classical flag witnesses E_sq = 0 after losing A'
    flag = classical_flag_extension(d)
    sw.fail("flag extends rho^{ABB'}", float(np.max(np.abs(flag.marginal([0, 1, 2]).mat - rho.marginal([0, 2, 3]).mat))), 1e-12)
    sw.fail("flag CMI", ent.conditional_mutual_information(flag, [0], [1, 2], [3]), 1e-9)
    for k, e in enumerate(env_dims):
        env = max(d_env, -(-d // e))

        def one(i, e=e, k=k, env=env):
            ch = random_channel(d, e, env, _rng(seed, k, i))
            return ch, prop1_terms(ch, d)

        for ch, t in _map(one, range(samples), threads):
            sw.record(t["slack"], _channel_payload(ch, env_dim=e), t["identities"], group=f"env_dim={e}")
    return sw.report()


def verify_prop2_formula(d: int = 2, m: int = 2, samples: int = 200, seed: int = 0, env_dim: int | None = None,
                         threads: int = 1, timed: bool = False) -> SweepReport:
    """Squashed entanglement formula for the generalized flower state with Haar ``V_k``."""
    rng = _rng(seed, 10**6)
    vs = [linalg.haar_unitary(d, rng) for _ in range(m)]
    env_dim = d if env_dim is None else env_dim
    sw = _Sweep("prop2", {"d": d, "m": m, "env_dim": env_dim}, seed, timed)
    target = 0.5 * math.log2(d) + math.log2(m) + 1
    rho = flower_purification_general(d, vs).reduced()
    sw.fail("trivial extension", 0.5 * ent.mutual_information(rho, [0, 1], [2, 3]) - target, 1e-10)
    payload_vs = [matrix_to_dict(v) for v in vs]

    def one(i):
        ch = random_channel(d, env_dim, d, _rng(seed, i))
        return ch, prop2_terms(ch, d, vs)

    for ch, t in _map(one, range(samples), threads):
        sw.record(t["slack"], _channel_payload(ch, unitaries=payload_vs), t["identities"])
    return sw.report()


def verify_prop3(d: int, samples: int = 500, seed: int = 0, threads: int = 1, timed: bool = False) -> SweepReport:
    """``S(AE) >= S(A)`` for extensions of (anti)symmetric states."""
    p_sym, p_anti = sym_antisym_projectors(d)
    sw = _Sweep("prop3", {"d": d}, seed, timed)

    def one(i):
        rng = _rng(seed, i)
        proj, name = (p_sym, "sym") if i % 2 == 0 else (p_anti, "anti")
        cap = int(round(np.trace(proj).real))
        rank = int(rng.integers(1, cap + 1))
        rho = random_supported_state(proj, rank, rng)
        d_c = rho.rank()
        ch = random_channel(d_c, int(rng.integers(1, 2 * d_c + 1)), d_c, rng)
        return name, rho, ch, prop3_terms(rho, ch)

    for name, rho, ch, t in _map(one, range(samples), threads):
        sw.record(t["slack"], lambda rho=rho, ch=ch: {"state": state_to_dict(rho), "channel": channel_to_dict(ch)},
                  t["identities"], group=name)
    return sw.report()


def verify_omega_corollary(d: int = 2, cfg: OptConfig | None = None, tol: float | None = None,
                           timed: bool = False) -> SweepReport:
    """Entanglement of purification of the flagged (anti)symmetric mixture and its marginal."""
    if d not in (2, 3):
        raise ValueError("the corollary check is sized for d = 2 or 3")
    cfg = cfg or OptConfig()
    tol = tol if tol is not None else (5e-3 if d == 2 else 1e-2)
    log_d = math.log2(d)
    sw = _Sweep("omega-corollary", {"d": d, "tol": tol, "restarts": cfg.restarts}, cfg.seed, timed)
    omega = omega_state(d)
    full = entanglement_of_purification(omega, [0, 1], [2], omega.rank(), cfg)
    sw.record(full.value - log_d, lambda: {
        "d": d, "ext_dim": full.meta["ext_dim"], "d_env": full.meta["d_env"],
        "isometry": matrix_to_dict(full.best_params)})
    sw.fail("E_P(omega^{A'AB}) - log d", full.value - log_d, tol)
    marginal = omega.marginal([1, 2])
    ab = entanglement_of_purification(marginal, [0], [1], d, cfg)
    sw.samples += 1
    sw.fail("E_P(omega^{AB})", ab.value, tol)
    # lower bound: measure A' and branch into the normalized projector states
    proj = [np.diag([1.0, 0.0]), np.diag([0.0, 1.0])]
    branches = instrument_branches(omega, [[p] for p in proj], factor=0)
    floor = 0.0
    lemma4 = 0.0
    for p, state in branches:
        sub = state.marginal([1, 2])
        s_a = ent.subsystem_entropy(sub, [0])
        sw.fail("branch S(A) = log d", s_a - log_d, IDENTITY_TOL)
        floor += p * s_a
        lemma4 += p * entanglement_of_purification(sub, [0], [1], sub.rank(), cfg).value
    sw.fail("branch floor = log d", floor - log_d, IDENTITY_TOL)
    sw.checks["lemma4 margin"] = full.value - lemma4
    if full.value < lemma4 - tol:
        sw.violations += 1
    sw.breakdown = {"E_P(omega^{A'AB})": full.value, "E_P(omega^{AB})": ab.value, "floor": floor}
    return sw.report()


def verify_coherent_info_bound(d: int, samples: int = 1000, seed: int = 0, group: str = "zd",
                               threads: int = 1, timed: bool = False) -> SweepReport:
    """Coherent information is at least ``log d - eps_0 - eps_1`` with ``eps_k = log d - chi_k``.

    This implies the weaker ``log d - 2 eps`` with ``eps = max(eps_0, eps_1)``.

    Half of the samples are Haar-random channels, half are small perturbations
    of the identity (environment of dimension 2), where the bound is not vacuous.
    """
    g = _group(d, group)
    sw = _Sweep("coherent", {"d": d, "group": group}, seed, timed)

    def one(i):
        rng = _rng(seed, i)
        if i % 2 == 0:
            ch = random_channel(d, d, d, rng)
        else:
            emb = np.zeros((2 * d, d), dtype=complex)
            emb[0::2, :] = np.eye(d)
            h = linalg.random_hermitian(2 * d, rng)
            v = expm(1j * 0.05 * h) @ emb
            ch = channel_from_isometry(v, d, 2)
        return ("haar" if i % 2 == 0 else "near-identity"), ch, coherent_terms(ch, g)

    for name, ch, t in _map(one, range(samples), threads):
        sw.record(t["slack"], _channel_payload(ch), t["identities"], group=name)
    return sw.report()


def verify_maassen_uffink(d: int, samples: int = 1000, seed: int = 0, threads: int = 1,
                          timed: bool = False) -> SweepReport:
    """``S(M_0(rho)) + S(M_1(rho)) >= log d`` for computational and Fourier bases."""
    u = AbelianGroup.cyclic(d).fourier()
    sw = _Sweep("maassen-uffink", {"d": d}, seed, timed)

    def one(i):
        rng = _rng(seed, i)
        if i % 10 == 9:
            # basis states saturate the bound
            rho = DensityOperator(np.diag(np.eye(d)[i % d]).astype(complex), (d,))
        else:
            rank = 1 if i % 3 == 0 else int(rng.integers(1, d + 1))
            rho = random_density(d, rng, rank)
        return rho, uncertainty_terms(rho, u)

    for rho, t in _map(one, range(samples), threads):
        sw.record(t["slack"], lambda rho=rho: {"state": state_to_dict(rho)})
    return sw.report()


def explore_nonfourier(d: int, samples: int = 200, seed: int = 0) -> dict:
    """Conjecture exploration: channel inequality with a Haar-random rotation instead of Fourier.

    Reports the slack distribution and asserts nothing.
    """
    slacks = []
    mub = []
    for i in range(samples):
        rng = _rng(seed, i)
        u = linalg.haar_unitary(d, rng)
        ch = random_channel(d, d, d, rng)
        e0, e1 = basis_ensembles(d, u)
        chi0 = ent.holevo_chi(ent.channel_output_ensemble(ch, e0))
        chi1 = ent.holevo_chi(ent.channel_output_ensemble(ch, e1))
        slacks.append(ent.channel_mutual_information(ch, d) - chi0 - chi1)
        mub.append(float(np.max(np.abs(u) ** 2) * d))
    q = np.quantile(slacks, [0.0, 0.05, 0.5, 0.95, 1.0]).tolist() if slacks else []
    return {
        "mode": "conjecture-exploration",
        "d": d,
        "samples": samples,
        "seed": seed,
        "slack_quantiles": q,
        "negative_fraction": float(np.mean(np.array(slacks) < 0)) if slacks else None,
        "max_overlap_times_d": max(mub) if mub else None,
    }


# -- replay ----------------------------------------------------------------------

def replay(report) -> float | None:
    """Recompute the worst-case slack of a report from its serialized inputs."""
    r = report.to_dict() if isinstance(report, SweepReport) else report
    w, p = r["worst_case"], r["params"]
    if w is None:
        return None
    prop = r["property"]
    if prop in ("lemma1", "lemma1-relent", "omega", "coherent"):
        ch = channel_from_dict(w["channel"])
        g = _group(p["d"], p.get("group", "zd"))
        if prop == "lemma1":
            return lemma1_terms(ch, g)["slack"]
        if prop == "lemma1-relent":
            return relent_terms(ch, g)["slack"]
        if prop == "omega":
            o = omega_terms(ch, g)
            return o["I(AB;C)"] - o["I(A;C)"] - o["I(B;C)"]
        return coherent_terms(ch, g)["slack"]
    if prop == "prop1":
        return prop1_terms(channel_from_dict(w["channel"]), p["d"])["slack"]
    if prop == "prop2":
        vs = [matrix_from_dict(v) for v in w["unitaries"]]
        return prop2_terms(channel_from_dict(w["channel"]), p["d"], vs)["slack"]
    if prop == "prop3":
        return prop3_terms(state_from_dict(w["state"]), channel_from_dict(w["channel"]))["slack"]
    if prop == "maassen-uffink":
        return uncertainty_terms(state_from_dict(w["state"]), AbelianGroup.cyclic(p["d"]).fourier())["slack"]
    if prop == "omega-corollary":
        obj = purification_objective(omega_state(w["d"]), [0, 1], [2], w["ext_dim"], w["d_env"])
        return obj.value(matrix_from_dict(w["isometry"])) - math.log2(w["d"])
    raise ValueError(f"unknown property {prop!r}")


def verify_all(seed: int = 0, quick: bool = False, samples: int | None = None, threads: int = 1,
               cfg: OptConfig | None = None, timed: bool = False) -> list[SweepReport]:
    """Run every verification once with default parameters."""
    n = samples if samples is not None else 1000
    if quick:
        n = min(n, 100)
    cap = 3 if quick else None

    def dim(d):
        return min(d, cap) if cap else d

    cfg = cfg or OptConfig(seed=seed, restarts=4 if quick else 16)
    kw = {"seed": seed, "threads": threads, "timed": timed}
    return [
        verify_lemma1(dim(3), samples=n, **kw),
        verify_lemma1_relent_form(dim(3), samples=n, **kw),
        verify_omega_identities(dim(3), samples=n, **kw),
        verify_prop1(2, samples=n, env_dims=(1, 2, 4), **kw),
        verify_prop2_formula(2, 2, samples=min(n, 200), **kw),
        verify_prop3(dim(3), samples=min(n, 500), **kw),
        verify_omega_corollary(2, cfg, timed=timed),
        verify_coherent_info_bound(dim(3), samples=n, **kw),
        verify_maassen_uffink(dim(5), samples=n, **kw),
    ]
