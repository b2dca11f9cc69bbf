"""Doc-vector model over rooted-subgraph tokens (PV-DBOW with negative sampling).

Each graph is a document whose tokens are WL relabeling outputs collected at
every node over iterations 0..depth. A document vector predicts its tokens
through a negative-sampling objective, trained by sequential SGD so results
are reproducible bit-for-bit for a fixed seed.
"""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .graphs import Graph, wl_labels

logger = logging.getLogger(__name__)

__all__ = [
    "wl_corpus",
    "Vocabulary",
    "DocModelConfig",
    "DocVectorModel",
    "pair_objective",
    "pair_gradient",
    "train_doc_model",
]


def wl_corpus(g: Graph, depth: int = 2) -> list[str]:
    """Token multiset for one graph: one token per (node, WL iteration).

    Tokens carry the iteration index so colors from different rounds never
    collide. n*(depth+1) tokens total.
    """
    if depth < 1:
        raise ValueError("depth must be >= 1")
    rounds = wl_labels(g, depth)
    return [f"{it}_{label}" for it, labels in enumerate(rounds) for label in sorted(labels)]


class Vocabulary:
    """Token index with frequencies, negative-sampling and downsampling tables."""

    def __init__(self, documents: list[list[str]], downsample: float = 1e-4):
        counts: Counter[str] = Counter()
        for doc in documents:
            counts.update(doc)
        if not counts:
            raise ValueError("empty vocabulary")
        self.tokens = sorted(counts)
        self.index = {t: i for i, t in enumerate(self.tokens)}
        self.counts = np.array([counts[t] for t in self.tokens], dtype=np.float64)
        total = self.counts.sum()
        freq = self.counts / total
        # frequency-proportional negative sampling
        self.neg_probs = freq
        # word2vec-style discard rule for frequent tokens
        with np.errstate(divide="ignore"):
            keep = np.sqrt(downsample / freq) + downsample / freq
        self.keep_probs = np.minimum(keep, 1.0)

    def __len__(self) -> int:
        return len(self.tokens)

    def encode(self, doc: list[str]) -> list[int]:
        """Token ids, silently skipping out-of-vocabulary tokens."""
        return [self.index[t] for t in doc if t in self.index]


def _sigmoid(x: np.ndarray | float) -> np.ndarray | float:
    return 1.0 / (1.0 + np.exp(-np.clip(x, -30.0, 30.0)))


def pair_objective(doc_vec: np.ndarray, pos_vec: np.ndarray, neg_vecs: np.ndarray) -> float:
    """Negative-sampling loss for one (document, token) pair.

    J = -log sigma(d.u_pos) - sum_k log sigma(-d.u_k); minimized by SGD.
    """
    pos = float(_sigmoid(doc_vec @ pos_vec))
    negs = _sigmoid(-neg_vecs @ doc_vec)
    return -np.log(pos) - float(np.sum(np.log(negs)))


def pair_gradient(
    doc_vec: np.ndarray, pos_vec: np.ndarray, neg_vecs: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Analytic gradients of pair_objective w.r.t. (doc, pos token, neg tokens)."""
    g_pos_score = float(_sigmoid(doc_vec @ pos_vec)) - 1.0  # dJ/d(d.u_pos)
    g_neg_scores = np.asarray(_sigmoid(neg_vecs @ doc_vec))  # dJ/d(d.u_k)
    grad_doc = g_pos_score * pos_vec + g_neg_scores @ neg_vecs
    grad_pos = g_pos_score * doc_vec
    grad_negs = np.outer(g_neg_scores, doc_vec)
    return grad_doc, grad_pos, grad_negs


@dataclass(frozen=True)
class DocModelConfig:
    dims: int = 128
    epochs: int = 100
    lr: float = 0.065
    min_lr: float = 1e-4
    neg_samples: int = 5
    downsample: float = 1e-4
    wl_depth: int = 2
    seed: int = 0


@dataclass
class DocVectorModel:
    """Trained corpus model: one row per training document plus token vectors."""

    config: DocModelConfig
    vocab: Vocabulary
    doc_vectors: np.ndarray  # (n_docs, dims)
    token_vectors: np.ndarray  # (|vocab|, dims)
    loss_history: list[float] = field(default_factory=list)

    def infer(self, doc: list[str], seed: int = 0) -> np.ndarray:
        """Project a document onto the embedded space with frozen token vectors.

        Minimizes the expected negative-sampling objective (negatives taken
        in expectation over the sampling distribution), which is convex in
        the document vector, so the projection is deterministic and unique.
        """
        ids = self.vocab.encode(doc)
        if not ids:
            logger.warning("document has no in-vocabulary tokens; returning zero vector")
            return np.zeros(self.config.dims)
        return _project_doc(
            ids, self.token_vectors, self.vocab.neg_probs, self.config.neg_samples
        )


def _project_doc(
    ids: list[int],
    token_vectors: np.ndarray,
    neg_probs: np.ndarray,
    neg_samples: int,
    x0: np.ndarray | None = None,
) -> np.ndarray:
    """Minimize the convex expected objective for one document vector."""
    from scipy.optimize import minimize

    pos = token_vectors[ids]
    weight = len(ids) * neg_samples

    def objective(d: np.ndarray) -> tuple[float, np.ndarray]:
        s_pos = _sigmoid(pos @ d)
        s_all = _sigmoid(token_vectors @ d)
        loss = -np.sum(np.log(np.maximum(s_pos, 1e-12))) - weight * float(
            neg_probs @ np.log(np.maximum(1.0 - s_all, 1e-12))
        )
        grad = (s_pos - 1.0) @ pos + weight * ((neg_probs * s_all) @ token_vectors)
        return loss, grad

    if x0 is None:
        x0 = np.zeros(token_vectors.shape[1])
    res = minimize(objective, x0, jac=True, method="L-BFGS-B", options={"maxiter": 500})
    return res.x


def _epoch_lr(cfg: DocModelConfig, epoch: int) -> float:
    if cfg.epochs == 1:
        return cfg.lr
    return cfg.lr + (cfg.min_lr - cfg.lr) * epoch / (cfg.epochs - 1)


def train_doc_model(documents: list[list[str]], config: DocModelConfig) -> DocVectorModel:
    """Train document and token vectors by sequential SGD.

    Deterministic for a fixed config seed: shuffling, negative draws and
    downsampling all come from one seeded generator, single worker.
    """
    if len(documents) < 2:
        raise ValueError("need at least 2 documents")
    cfg = config
    vocab = Vocabulary(documents, downsample=cfg.downsample)
    encoded = [vocab.encode(doc) for doc in documents]
    rng = np.random.default_rng([cfg.seed, 104729])
    n_docs = len(documents)
    doc_vectors = (rng.random((n_docs, cfg.dims)) - 0.5) / cfg.dims
    token_vectors = np.zeros((len(vocab), cfg.dims))

    history: list[float] = []
    for epoch in range(cfg.epochs):
        lr = _epoch_lr(cfg, epoch)
        pairs: list[tuple[int, int]] = []
        for d, ids in enumerate(encoded):
            keep = rng.random(len(ids)) < vocab.keep_probs[ids]
            pairs.extend((d, t) for t, k in zip(ids, keep) if k)
        order = rng.permutation(len(pairs))
        negs = rng.choice(len(vocab), size=(len(pairs), cfg.neg_samples), p=vocab.neg_probs)
        epoch_loss = 0.0
        for j, k in enumerate(order):
            d, tok = pairs[int(k)]
            dv = doc_vectors[d]
            pos_vec = token_vectors[tok]
            neg_vecs = token_vectors[negs[j]]
            epoch_loss += pair_objective(dv, pos_vec, neg_vecs)
            grad_doc, grad_pos, grad_negs = pair_gradient(dv, pos_vec, neg_vecs)
            doc_vectors[d] = dv - lr * grad_doc
            token_vectors[tok] = pos_vec - lr * grad_pos
            # subtract.at handles repeated negative draws correctly
            np.subtract.at(token_vectors, negs[j], lr * grad_negs)
        history.append(epoch_loss / max(len(pairs), 1))

    # align every document row with the convex projection used at inference
    # time, so re-inferring a training document recovers its stored row; the
    # projection must start from the same point as infer() because directions
    # orthogonal to the token-vector span are unconstrained by the objective
    for d, ids in enumerate(encoded):
        if ids:
            doc_vectors[d] = _project_doc(ids, token_vectors, vocab.neg_probs, cfg.neg_samples)
    return DocVectorModel(cfg, vocab, doc_vectors, token_vectors, history)
