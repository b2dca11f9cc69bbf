"""Noisy QAOA energy estimation via stochastic Pauli trajectories.

Each trajectory runs the exact circuit; with probability scale*p1 a random
non-identity Pauli is injected after each single-qubit mixer rotation, and
with probability scale*p2 after each two-qubit phase term. Readout bit flips
enter the cut expectation analytically (independent flips per bit).

Injection opportunities for one trajectory draw their uniforms from an RNG
keyed by (seed, trajectory index) before the scale is applied, so sweeps
over scale factors are coupled: a larger scale strictly widens the set of
injected errors, never resamples it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graphs import Graph
from .qaoa import QaoaParams, cut_table, uniform_state

__all__ = ["NoiseModel", "NoisyEstimate", "noisy_energy", "error_stats", "sweep_scale"]

_PAULI_1Q = ("X", "Y", "Z")
# all 15 non-identity two-qubit Paulis
_PAULI_2Q = tuple(
    (a, b) for a in ("I", "X", "Y", "Z") for b in ("I", "X", "Y", "Z") if (a, b) != ("I", "I")
)


@dataclass(frozen=True)
class NoiseModel:
    """Depolarizing injection probabilities plus readout flip probability."""

    p1: float = 1e-3
    p2: float = 1e-2
    p_ro: float = 2e-2
    scale: float = 1.0

    def __post_init__(self):
        if self.scale < 0:
            raise ValueError("scale must be >= 0")
        for name in ("p1", "p2", "p_ro"):
            v = getattr(self, name) * self.scale
            if not 0.0 <= v < 1.0:
                raise ValueError(f"scaled {name} = {v} out of [0, 1)")

    def with_scale(self, scale: float) -> "NoiseModel":
        return NoiseModel(self.p1, self.p2, self.p_ro, scale)


@dataclass
class NoisyEstimate:
    e_noisy: float
    stderr: float
    n_traj: int
    seed: int


def _apply_pauli(state: np.ndarray, q: int, pauli: str) -> np.ndarray:
    if pauli == "I":
        return state
    n_low = 1 << q
    view = state.reshape(-1, 2, n_low)
    a = view[:, 0, :].copy()
    b = view[:, 1, :]
    if pauli == "X":
        view[:, 0, :] = b
        view[:, 1, :] = a
    elif pauli == "Y":
        view[:, 0, :] = -1j * b
        view[:, 1, :] = 1j * a
    else:  # Z
        view[:, 1, :] = -b
    return state


def _mixer_rotation(state: np.ndarray, q: int, beta: float) -> np.ndarray:
    c, s = np.cos(beta), np.sin(beta)
    view = state.reshape(-1, 2, 1 << q)
    a = view[:, 0, :].copy()
    b = view[:, 1, :]
    view[:, 0, :] = c * a - 1j * s * b
    view[:, 1, :] = -1j * s * a + c * b
    return state


def _trajectory_energy(
    g: Graph,
    params: QaoaParams,
    nm: NoiseModel,
    uniforms: np.ndarray,
    choices: np.ndarray,
    cuts: np.ndarray,
    edge_cut_masks: list[np.ndarray],
) -> float:
    """Expected cut of one noisy trajectory (before readout noise)."""
    n, p = g.n, params.p
    q1 = nm.p1 * nm.scale
    q2 = nm.p2 * nm.scale
    state = uniform_state(n)
    k = 0  # opportunity cursor, shared layout with every scale
    for layer in range(p):
        gamma, beta = params.gammas[layer], params.betas[layer]
        # phase layer, one opportunity per edge term
        edge_events = uniforms[k : k + g.m] < q2
        if not edge_events.any():
            state = state * np.exp(-1j * gamma * cuts)
        else:
            phase = np.exp(-1j * gamma)
            for e, (u, v) in enumerate(g.edges):
                state = np.where(edge_cut_masks[e], state * phase, state)
                if edge_events[e]:
                    pa, pb = _PAULI_2Q[int(choices[k + e]) % len(_PAULI_2Q)]
                    state = _apply_pauli(state, u, pa)
                    state = _apply_pauli(state, v, pb)
        k += g.m
        # mixer layer, one opportunity per qubit rotation
        qubit_events = uniforms[k : k + n] < q1
        for q in range(n):
            state = _mixer_rotation(state, q, beta)
            if qubit_events[q]:
                state = _apply_pauli(state, q, _PAULI_1Q[int(choices[k + q]) % len(_PAULI_1Q)])
        k += n
    return float(np.sum((state.real**2 + state.imag**2) * cuts))


def noisy_energy(
    g: Graph,
    params: QaoaParams,
    nm: NoiseModel,
    n_traj: int = 500,
    seed: int = 0,
) -> NoisyEstimate:
    """Monte Carlo estimate of the noisy QAOA energy."""
    if n_traj < 1:
        raise ValueError("n_traj must be >= 1")
    cuts = cut_table(g)
    z = np.arange(1 << g.n, dtype=np.uint32)
    edge_cut_masks = [(((z >> u) ^ (z >> v)) & 1).astype(bool) for u, v in g.edges]
    n_ops = params.p * (g.m + g.n)
    ideal = None  # computed lazily for injection-free trajectories

    energies = np.empty(n_traj)
    for t in range(n_traj):
        rng = np.random.default_rng([seed, t])
        uniforms = rng.random(n_ops)
        choices = rng.integers(0, 2**31, size=n_ops)
        q1, q2 = nm.p1 * nm.scale, nm.p2 * nm.scale
        clean = True
        k = 0
        for _ in range(params.p):
            if (uniforms[k : k + g.m] < q2).any() or (uniforms[k + g.m : k + g.m + g.n] < q1).any():
                clean = False
                break
            k += g.m + g.n
        if clean:
            if ideal is None:
                ideal = _trajectory_energy(
                    g, params, nm.with_scale(0.0), uniforms, choices, cuts, edge_cut_masks
                )
            energies[t] = ideal
        else:
            energies[t] = _trajectory_energy(
                g, params, nm, uniforms, choices, cuts, edge_cut_masks
            )

    # readout flips: an edge's measured endpoints differ with probability
    # (1-q)^2 + q^2 when the underlying bits differ and 2q(1-q) otherwise,
    # so E_ro = (1 - 2a) * E + a * m with a = 2q(1-q)
    q = nm.p_ro * nm.scale
    a = 2.0 * q * (1.0 - q)
    energies = (1.0 - 2.0 * a) * energies + a * g.m
    stderr = float(energies.std(ddof=1) / np.sqrt(n_traj)) if n_traj > 1 else 0.0
    return NoisyEstimate(float(energies.mean()), stderr, n_traj, seed)


def error_stats(e_ideal: float, est: NoisyEstimate) -> tuple[float, float]:
    """Absolute error |E_noisy| - |E_ideal| and its ratio to |E_ideal|."""
    delta_e = abs(est.e_noisy) - abs(e_ideal)
    if e_ideal == 0:
        raise ValueError("relative error undefined for zero ideal energy")
    return delta_e, delta_e / abs(e_ideal)


def sweep_scale(
    items: list[tuple[int, Graph, QaoaParams]],
    scales: list[float],
    nm: NoiseModel,
    n_traj: int = 500,
    seed: int = 0,
) -> tuple[list[dict], list[dict]]:
    """Noise sweep over (graph, params) pairs and scale factors.

    Returns per-run rows and per-scale box-plot aggregates
    (median, mean, quartiles, 1.5*IQR whiskers, outlier count).
    """
    from .qaoa import qaoa_energy

    rows: list[dict] = []
    for gid, g, params in items:
        e_ideal = qaoa_energy(g, params)
        for scale in scales:
            est = noisy_energy(g, params, nm.with_scale(scale), n_traj=n_traj, seed=seed + gid)
            delta_e, rel = error_stats(e_ideal, est)
            rows.append(
                {
                    "graph_id": gid,
                    "scale": scale,
                    "e_ideal": e_ideal,
                    "e_noisy": est.e_noisy,
                    "stderr": est.stderr,
                    "delta_e": delta_e,
                    "rel_err": rel,
                }
            )

    aggregates: list[dict] = []
    for scale in scales:
        vals = np.array([r["delta_e"] for r in rows if r["scale"] == scale])
        q1, med, q3 = np.percentile(vals, [25, 50, 75])
        iqr = q3 - q1
        lo = vals[vals >= q1 - 1.5 * iqr].min()
        hi = vals[vals <= q3 + 1.5 * iqr].max()
        aggregates.append(
            {
                "scale": scale,
                "mean": float(vals.mean()),
                "median": float(med),
                "q1": float(q1),
                "q3": float(q3),
                "lo_whisker": float(lo),
                "hi_whisker": float(hi),
                "n_outliers": int(((vals < lo) | (vals > hi)).sum()),
            }
        )
    return rows, aggregates
