"""QAOA parameter transferability for MaxCut via whole-graph embeddings."""

__version__ = "0.1.0"

from .graphs import (  # noqa: F401
    Graph,
    generate_random,
    generate_regular,
    generate_watts_strogatz,
    line_graph,
    parity,
    wl_fingerprint,
)
from .maxcut import CutSolution, cut_value, exact_maxcut  # noqa: F401
from .qaoa import (  # noqa: F401
    OptimizationRecord,
    QaoaParams,
    approx_ratio,
    multistart,
    optimize,
    qaoa_energy,
)
from .embeddings import EmbeddingConfig, EmbeddingModel, distance, fit_embedding  # noqa: F401
from .donordb import DonorDatabase, DonorEntry, build_db, transfer_eval, warm_start  # noqa: F401
from .noise import NoiseModel, NoisyEstimate, error_stats, noisy_energy, sweep_scale  # noqa: F401
