"""Exact statevector simulation of the MaxCut QAOA ansatz.

Basis convention: amplitude index z encodes node i at bit i (little endian),
so cut values are computed directly on the index. Everything is maximization:
the optimizer maximizes the expected cut.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .graphs import Graph

__all__ = [
    "QaoaParams",
    "OptimizationRecord",
    "SIM_CAP",
    "uniform_state",
    "cut_table",
    "apply_phase",
    "apply_mixer",
    "qaoa_state",
    "expectation",
    "qaoa_energy",
    "approx_ratio",
    "optimize",
    "multistart",
    "random_params",
]

SIM_CAP = 24

GAMMA_RANGE = (0.0, 2.0 * np.pi)
BETA_RANGE = (0.0, np.pi)


@dataclass(frozen=True)
class QaoaParams:
    """Angle schedule (gammas, betas) of depth p. Stored unreduced."""

    gammas: tuple[float, ...]
    betas: tuple[float, ...]

    def __post_init__(self):
        if len(self.gammas) != len(self.betas) or len(self.gammas) < 1:
            raise ValueError("need equal-length, non-empty gamma and beta schedules")
        object.__setattr__(self, "gammas", tuple(float(x) for x in self.gammas))
        object.__setattr__(self, "betas", tuple(float(x) for x in self.betas))

    @property
    def p(self) -> int:
        return len(self.gammas)

    def as_vector(self) -> np.ndarray:
        return np.array(self.gammas + self.betas, dtype=float)

    @classmethod
    def from_vector(cls, x: np.ndarray) -> "QaoaParams":
        p = len(x) // 2
        return cls(tuple(x[:p]), tuple(x[p:]))

    def to_dict(self) -> dict:
        return {"gammas": list(self.gammas), "betas": list(self.betas)}

    @classmethod
    def from_dict(cls, d: dict) -> "QaoaParams":
        return cls(tuple(d["gammas"]), tuple(d["betas"]))


@dataclass
class OptimizationRecord:
    params: QaoaParams
    energy: float
    evals: int
    seed: int
    wall_time_s: float = 0.0
    budget_exhausted: bool = False

    def to_dict(self) -> dict:
        # wall_time_s is deliberately left out: serialized records must be
        # byte-identical across runs for reproducible database files
        return {
            "gammas": list(self.params.gammas),
            "betas": list(self.params.betas),
            "energy": self.energy,
            "evals": self.evals,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "OptimizationRecord":
        return cls(
            params=QaoaParams(tuple(d["gammas"]), tuple(d["betas"])),
            energy=float(d["energy"]),
            evals=int(d["evals"]),
            seed=int(d["seed"]),
            wall_time_s=float(d.get("wall_time_s", 0.0)),
        )


def _check_cap(n: int) -> None:
    if n > SIM_CAP:
        raise ValueError(f"n = {n} exceeds simulator cap {SIM_CAP}")


def uniform_state(n: int) -> np.ndarray:
    _check_cap(n)
    dim = 1 << n
    return np.full(dim, 1.0 / np.sqrt(dim), dtype=np.complex128)


def cut_table(g: Graph) -> np.ndarray:
    """C(z) for every basis index z; node i at bit i."""
    _check_cap(g.n)
    z = np.arange(1 << g.n, dtype=np.uint32)
    cuts = np.zeros(1 << g.n, dtype=np.float64)
    for u, v in g.edges:
        cuts += ((z >> u) ^ (z >> v)) & 1
    return cuts


def apply_phase(state: np.ndarray, g: Graph, gamma: float, cuts: np.ndarray | None = None) -> np.ndarray:
    """Diagonal phase layer: amp(z) *= exp(-i*gamma*C(z))."""
    if cuts is None:
        cuts = cut_table(g)
    return state * np.exp(-1j * gamma * cuts)


def apply_mixer(state: np.ndarray, beta: float) -> np.ndarray:
    """exp(-i*beta*sigma_x) on every qubit, as n butterfly passes."""
    n = int(np.log2(len(state)))
    c, s = np.cos(beta), np.sin(beta)
    out = state.copy()
    for q in range(n):
        view = out.reshape(-1, 2, 1 << q)
        a = view[:, 0, :].copy()
        b = view[:, 1, :]
        view[:, 0, :] = c * a - 1j * s * b
        view[:, 1, :] = -1j * s * a + c * b
    return out


def qaoa_state(g: Graph, params: QaoaParams, cuts: np.ndarray | None = None) -> np.ndarray:
    if cuts is None:
        cuts = cut_table(g)
    state = uniform_state(g.n)
    for gamma, beta in zip(params.gammas, params.betas):
        state = state * np.exp(-1j * gamma * cuts)
        state = apply_mixer(state, beta)
    return state


def expectation(state: np.ndarray, g: Graph, cuts: np.ndarray | None = None) -> float:
    if cuts is None:
        cuts = cut_table(g)
    return float(np.real(np.sum((state.real**2 + state.imag**2) * cuts)))


def qaoa_energy(g: Graph, params: QaoaParams, cuts: np.ndarray | None = None) -> float:
    if cuts is None:
        cuts = cut_table(g)
    return expectation(qaoa_state(g, params, cuts), g, cuts)


def approx_ratio(energy: float, cstar: float) -> float:
    if cstar <= 0:
        raise ValueError("cstar must be positive")
    return energy / cstar


def default_budget(p: int) -> int:
    return 200 * 2 * p


def optimize(
    g: Graph,
    init: QaoaParams,
    budget: int | None = None,
    seed: int = 0,
    cuts: np.ndarray | None = None,
) -> OptimizationRecord:
    """Derivative-free local maximization of the QAOA energy.

    Nelder-Mead with initial simplex edge 0.25 rad; returns the best-seen
    point, never worse than the initial one. Deterministic given the init.
    """
    p = init.p
    if budget is None:
        budget = default_budget(p)
    if budget < 2 * p + 1:
        raise ValueError(f"budget {budget} < 2p+1 = {2 * p + 1}")
    if cuts is None:
        cuts = cut_table(g)

    t0 = time.perf_counter()
    best = {"x": init.as_vector(), "energy": qaoa_energy(g, init, cuts), "evals": 1}

    def objective(x: np.ndarray) -> float:
        e = qaoa_energy(g, QaoaParams.from_vector(x), cuts)
        best["evals"] += 1
        if e > best["energy"]:
            best["energy"] = e
            best["x"] = x.copy()
        return -e

    x0 = init.as_vector()
    simplex = np.vstack([x0] + [x0 + 0.25 * np.eye(2 * p)[i] for i in range(2 * p)])
    res = minimize(
        objective,
        x0,
        method="Nelder-Mead",
        options={
            "initial_simplex": simplex,
            "maxfev": budget,
            "fatol": 1e-6,
            "xatol": 1e-8,
        },
    )
    return OptimizationRecord(
        params=QaoaParams.from_vector(best["x"]),
        energy=best["energy"],
        evals=best["evals"],
        seed=seed,
        wall_time_s=time.perf_counter() - t0,
        budget_exhausted=not res.success and best["evals"] >= budget,
    )


def random_params(p: int, rng: np.random.Generator) -> QaoaParams:
    gammas = rng.uniform(*GAMMA_RANGE, size=p)
    betas = rng.uniform(*BETA_RANGE, size=p)
    return QaoaParams(tuple(gammas), tuple(betas))


def multistart(
    g: Graph,
    p: int,
    n_starts: int,
    seed: int,
    budget: int | None = None,
) -> list[OptimizationRecord]:
    """Independent optimizer runs from uniform random inits, best first."""
    cuts = cut_table(g)
    records = []
    for i in range(n_starts):
        rng = np.random.default_rng([seed, i])
        rec = optimize(g, random_params(p, rng), budget=budget, seed=i, cuts=cuts)
        records.append(rec)
    records.sort(key=lambda r: (-r.energy, r.seed))
    return records
