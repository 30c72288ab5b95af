"""Local search over isometries ``V: C^n -> C^N``.

Points are updated by left multiplication with ``exp(G)``, ``G`` anti-Hermitian
of size ``N x N``, so every iterate is an exact isometry and no projection
step is needed. Search directions are nonlinear conjugate gradients (PR+) in
the Lie algebra of ``U(N)`` with an Armijo backtracking line search.

An objective is a callable ``f(V) -> (value, grad)`` where ``grad`` is the
Wirtinger derivative ``df/d conj(V)``, i.e. ``df = 2 Re Tr(grad^dagger dV)``.
"""
from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np
from scipy.linalg import expm

from .errors import OptimizerDiverged

Objective = Callable[[np.ndarray], "tuple[float, np.ndarray]"]

ARMIJO_C = 1e-4
MAX_BACKTRACK = 60
STALL_ITERS = 5
RESOLUTION = 1e-15


@dataclass
class OptConfig:
    restarts: int = 16
    max_iters: int = 2000
    step_tol: float = 1e-8
    value_tol: float = 1e-7
    seed: int = 0
    threads: int = 1

    def __post_init__(self):
        if self.restarts < 1 or self.max_iters < 1 or self.threads < 1:
            raise ValueError("restarts, max_iters and threads must be positive")
        if self.step_tol <= 0 or self.value_tol <= 0:
            raise ValueError("tolerances must be positive")

    def restart_rng(self, index: int) -> np.random.Generator:
        return np.random.default_rng([self.seed, index])


@dataclass
class RestartResult:
    value: float
    point: np.ndarray
    iterations: int
    converged: bool
    failed: bool


@dataclass
class OptReport:
    """Outcome of a multi-restart search."""

    value: float
    best_params: np.ndarray
    restarts: int
    iterations: list[int]
    converged: bool
    history: list[float]
    best_restart: int
    kind: str = ""
    config: OptConfig = field(default_factory=OptConfig)
    meta: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        p = np.asarray(self.best_params)
        return {
            "kind": self.kind,
            "value_bits": self.value,
            "best_params": {
                "shape": list(p.shape),
                "re": p.real.reshape(-1).tolist(),
                "im": p.imag.reshape(-1).tolist(),
            },
            "restarts": self.restarts,
            "iterations": list(self.iterations),
            "converged": self.converged,
            "history": list(self.history),
            "best_restart": self.best_restart,
            "seed": self.config.seed,
            "config": asdict(self.config),
            "meta": self.meta,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def skew_gradient(v: np.ndarray, grad: np.ndarray) -> np.ndarray:
    """Riemannian gradient in the Lie algebra for the update ``V -> exp(G) V``."""
    k = v @ grad.conj().T
    return k.conj().T - k


def _inner(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.real(np.vdot(a, b)))


def _step(v: np.ndarray, g: np.ndarray) -> np.ndarray:
    w = expm(g) @ v
    # re-orthonormalize columns to stop drift over thousands of steps
    q, r = np.linalg.qr(w)
    diag = np.diag(r)
    return q * np.where(np.abs(diag) > 0, diag / np.abs(diag), 1.0)


def descend(objective: Objective, v0: np.ndarray, cfg: OptConfig) -> RestartResult:
    """Run one local minimization from ``v0``."""
    v = np.array(v0, dtype=complex)
    f, grad = objective(v)
    g = skew_gradient(v, grad)
    d = -g
    t = 1.0 / max(np.linalg.norm(g), 1e-12)
    stall = 0
    converged = failed = False
    it = 0
    for it in range(1, cfg.max_iters + 1):
        gnorm2 = _inner(g, g)
        if gnorm2 < 1e-24:
            converged = True
            break
        slope = _inner(g, d)
        if slope >= 0:
            d, slope = -g, -gnorm2
        t = min(2.0 * t, 1e3)
        accepted = False
        for _ in range(MAX_BACKTRACK):
            if -t * slope < RESOLUTION * max(1.0, abs(f)):
                # the predicted decrease is below floating-point resolution
                break
            v_new = _step(v, t * d)
            f_new, grad_new = objective(v_new)
            if f_new <= f + ARMIJO_C * t * slope:
                accepted = True
                break
            t *= 0.5
        if not accepted:
            if np.array_equal(d, -g):
                # the objective fails to decrease along the steepest direction
                converged = np.sqrt(gnorm2) < 1e-6
                failed = not converged
                break
            d = -g
            continue
        step_norm = t * np.linalg.norm(d)
        decrease = f - f_new
        g_new = skew_gradient(v_new, grad_new)
        beta = max(0.0, _inner(g_new, g_new - g) / gnorm2)
        d = -g_new + beta * d
        v, f, g = v_new, f_new, g_new
        stall = stall + 1 if decrease < cfg.value_tol else 0
        if step_norm < cfg.step_tol or stall >= STALL_ITERS:
            converged = True
            break
    return RestartResult(float(f), v, it, converged, failed)


def multistart(
    objective: Objective,
    initial: Callable[[int, np.random.Generator], np.ndarray],
    cfg: OptConfig,
    kind: str = "",
    maximize: bool = False,
) -> OptReport:
    """Minimize (or maximize) over ``cfg.restarts`` independent starting points.

    ``initial(index, rng)`` returns the starting isometry for a restart. Each
    restart draws from its own generator seeded by ``(cfg.seed, index)``, so
    results do not depend on scheduling. The best restart wins, ties going to
    the lowest index.
    """
    sign = -1.0 if maximize else 1.0

    def signed(v):
        val, grad = objective(v)
        return sign * val, sign * grad

    def run(index):
        return descend(signed, initial(index, cfg.restart_rng(index)), cfg)

    if cfg.threads > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            results = list(pool.map(run, range(cfg.restarts)))
    else:
        results = [run(i) for i in range(cfg.restarts)]
    if all(r.failed for r in results):
        raise OptimizerDiverged(f"all {cfg.restarts} restarts failed the line search")
    best = min(range(len(results)), key=lambda i: (results[i].value, i))
    r = results[best]
    return OptReport(
        value=sign * r.value,
        best_params=r.point,
        restarts=cfg.restarts,
        iterations=[x.iterations for x in results],
        converged=r.converged,
        history=[sign * x.value for x in results],
        best_restart=best,
        kind=kind,
        config=cfg,
    )
