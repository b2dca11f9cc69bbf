"""Whole-graph embeddings and embedding-space distance.

Four working methods: graph2vec / gl2vec (doc-vector models over WL subgraph
tokens, the latter on line graphs), sf (low Laplacian spectrum) and feather
(random-walk weighted characteristic functions). The wavelet slot is reserved
but not implemented.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, asdict

import networkx as nx
import numpy as np

from .docmodel import DocModelConfig, DocVectorModel, Vocabulary, train_doc_model, wl_corpus
from .graphs import Graph, line_graph

__all__ = [
    "METHODS",
    "EmbeddingConfig",
    "EmbeddingModel",
    "fit_embedding",
    "embed_sf",
    "embed_feather",
    "distance",
]

METHODS = ("graph2vec", "gl2vec", "sf", "feather", "wavelet")

MODEL_FORMAT_VERSION = 1


@dataclass(frozen=True)
class EmbeddingConfig:
    method: str = "graph2vec"
    dims: int = 128
    epochs: int = 100
    lr: float = 0.065
    neg_samples: int = 5
    downsample: float = 1e-4
    wl_depth: int = 2
    sf_k: int = 128
    feather_order: int = 5
    feather_eval_points: int = 25
    feather_theta_max: float = 2.5
    seed: int = 0

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown embedding method {self.method!r}")


def embed_sf(g: Graph, k: int) -> np.ndarray:
    """k smallest Laplacian eigenvalues, ascending, zero-padded when n < k."""
    if k < 1:
        raise ValueError("k must be >= 1")
    lap = nx.laplacian_matrix(g.to_networkx(), nodelist=range(g.n)).toarray().astype(float)
    eigs = np.linalg.eigvalsh(lap)
    out = np.zeros(k)
    take = min(k, g.n)
    out[:take] = eigs[:take]
    return out


def _feather_features(g: Graph) -> np.ndarray:
    """Per-node features: log(1+degree) and clustering coefficient."""
    ng = g.to_networkx()
    deg = np.array(g.degrees(), dtype=float)
    clust = nx.clustering(ng)
    return np.column_stack([np.log1p(deg), [clust[v] for v in range(g.n)]])


def embed_feather(
    g: Graph, order: int = 5, eval_points: int = 25, theta_max: float = 2.5
) -> np.ndarray:
    """Mean-pooled r-scale random-walk characteristic functions of node features.

    For feature x, scale s and grid point theta: per-node value is
    sum_u P^s(v,u) * exp(i*theta*x_u) with P the random-walk transition
    matrix; real and imaginary parts are pooled over nodes and concatenated.
    """
    adj = np.zeros((g.n, g.n))
    for u, v in g.edges:
        adj[u, v] = adj[v, u] = 1.0
    deg = adj.sum(axis=1)
    if np.any(deg == 0):
        raise ValueError("feather requires minimum degree 1")
    trans = adj / deg[:, None]
    assert np.allclose(trans.sum(axis=1), 1.0, atol=1e-12)
    thetas = np.linspace(theta_max / eval_points, theta_max, eval_points)
    feats = _feather_features(g)
    blocks = []
    for f in range(feats.shape[1]):
        char = np.exp(1j * np.outer(feats[:, f], thetas))  # (n, eval_points)
        walked = char
        for _ in range(order):
            walked = trans @ walked
            pooled = walked.mean(axis=0)
            blocks.append(pooled.real)
            blocks.append(pooled.imag)
    return np.concatenate(blocks)


def distance(a: np.ndarray, b: np.ndarray) -> float:
    """Euclidean distance between embedding vectors."""
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return float(np.linalg.norm(b - a))


class EmbeddingModel:
    """A fitted embedding: training-graph vectors plus an inference path."""

    def __init__(
        self,
        config: EmbeddingConfig,
        vectors: np.ndarray,
        doc_model: DocVectorModel | None = None,
        sf_k: int | None = None,
    ):
        self.config = config
        self.vectors = np.asarray(vectors, dtype=float)
        self.doc_model = doc_model
        self.sf_k = sf_k

    @property
    def method(self) -> str:
        return self.config.method

    @property
    def dims(self) -> int:
        return self.vectors.shape[1]

    def _tokens(self, g: Graph) -> list[str]:
        target = line_graph(g) if self.method == "gl2vec" else g
        return wl_corpus(target, self.config.wl_depth)

    def infer(self, g: Graph, seed: int = 0) -> np.ndarray:
        if self.method in ("graph2vec", "gl2vec"):
            assert self.doc_model is not None
            return self.doc_model.infer(self._tokens(g), seed=seed)
        if self.method == "sf":
            assert self.sf_k is not None
            return embed_sf(g, self.sf_k)
        if self.method == "feather":
            c = self.config
            return embed_feather(g, c.feather_order, c.feather_eval_points, c.feather_theta_max)
        raise NotImplementedError(f"embedding method {self.method!r} is not implemented")

    # -- persistence ---------------------------------------------------

    def save(self, path: str) -> None:
        payload: dict = {
            "version": MODEL_FORMAT_VERSION,
            "config": asdict(self.config),
            "vectors": self.vectors.tolist(),
        }
        if self.doc_model is not None:
            dm = self.doc_model
            vocab_blob = json.dumps(dm.vocab.tokens).encode()
            payload["doc_model"] = {
                "tokens": dm.vocab.tokens,
                "counts": dm.vocab.counts.tolist(),
                "vocab_hash": hashlib.sha256(vocab_blob).hexdigest(),
                "doc_vectors": dm.doc_vectors.tolist(),
                "token_vectors": dm.token_vectors.tolist(),
            }
        if self.sf_k is not None:
            payload["sf_k"] = self.sf_k
        with open(path, "w") as fh:
            json.dump(payload, fh)

    @classmethod
    def load(cls, path: str) -> "EmbeddingModel":
        with open(path) as fh:
            payload = json.load(fh)
        if payload.get("version") != MODEL_FORMAT_VERSION:
            raise ValueError(f"unsupported model format version {payload.get('version')!r}")
        config = EmbeddingConfig(**payload["config"])
        doc_model = None
        if "doc_model" in payload:
            blob = payload["doc_model"]
            vocab = Vocabulary.__new__(Vocabulary)
            vocab.tokens = list(blob["tokens"])
            vocab.index = {t: i for i, t in enumerate(vocab.tokens)}
            vocab.counts = np.asarray(blob["counts"], dtype=float)
            freq = vocab.counts / vocab.counts.sum()
            vocab.neg_probs = freq
            with np.errstate(divide="ignore"):
                keep = np.sqrt(config.downsample / freq) + config.downsample / freq
            vocab.keep_probs = np.minimum(keep, 1.0)
            doc_model = DocVectorModel(
                config=DocModelConfig(
                    dims=config.dims,
                    epochs=config.epochs,
                    lr=config.lr,
                    neg_samples=config.neg_samples,
                    downsample=config.downsample,
                    wl_depth=config.wl_depth,
                    seed=config.seed,
                ),
                vocab=vocab,
                doc_vectors=np.asarray(blob["doc_vectors"]),
                token_vectors=np.asarray(blob["token_vectors"]),
            )
        return cls(
            config,
            np.asarray(payload["vectors"]),
            doc_model=doc_model,
            sf_k=payload.get("sf_k"),
        )


def fit_embedding(graphs: list[Graph], config: EmbeddingConfig) -> EmbeddingModel:
    """Fit the chosen method on a training corpus of graphs."""
    method = config.method
    if method in ("graph2vec", "gl2vec"):
        targets = [line_graph(g) if method == "gl2vec" else g for g in graphs]
        documents = [wl_corpus(t, config.wl_depth) for t in targets]
        dm_config = DocModelConfig(
            dims=config.dims,
            epochs=config.epochs,
            lr=config.lr,
            neg_samples=config.neg_samples,
            downsample=config.downsample,
            wl_depth=config.wl_depth,
            seed=config.seed,
        )
        dm = train_doc_model(documents, dm_config)
        return EmbeddingModel(config, dm.doc_vectors, doc_model=dm)
    if method == "sf":
        k = min(config.sf_k, max(g.n for g in graphs))
        vectors = np.vstack([embed_sf(g, k) for g in graphs])
        return EmbeddingModel(config, vectors, sf_k=k)
    if method == "feather":
        vectors = np.vstack(
            [
                embed_feather(
                    g, config.feather_order, config.feather_eval_points, config.feather_theta_max
                )
                for g in graphs
            ]
        )
        return EmbeddingModel(config, vectors)
    raise NotImplementedError(f"embedding method {method!r} is not implemented")
