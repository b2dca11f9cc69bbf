"""Graph representation, generators with parity control, and fingerprinting.

Graphs are unweighted, undirected, simple, with nodes labeled 0..n-1.
Generators take explicit seeds and are deterministic; there is no shared
RNG state, so everything here is safe to call concurrently.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable

import networkx as nx
import numpy as np

__all__ = [
    "Graph",
    "GraphError",
    "GenerationError",
    "parity",
    "generate_random",
    "generate_regular",
    "generate_watts_strogatz",
    "wl_fingerprint",
    "wl_labels",
    "line_graph",
    "to_json",
    "from_json",
]


class GraphError(ValueError):
    """Invalid graph structure or arguments."""


class GenerationError(RuntimeError):
    """A generator could not reach its target within the retry budget."""

    def __init__(self, message: str, attempts: int = 0):
        super().__init__(message)
        self.attempts = attempts


def _normalize_edges(edges: Iterable[tuple[int, int]]) -> tuple[tuple[int, int], ...]:
    return tuple(sorted((min(u, v), max(u, v)) for u, v in edges))


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph on nodes 0..n-1."""

    n: int
    edges: tuple[tuple[int, int], ...]
    meta: dict[str, Any] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "edges", _normalize_edges(self.edges))
        self.validate()

    def validate(self) -> None:
        if self.n < 1:
            raise GraphError("empty graph")
        seen = set()
        for u, v in self.edges:
            if u == v:
                raise GraphError(f"self-loop at node {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise GraphError(f"edge ({u},{v}) endpoint out of range for n={self.n}")
            if (u, v) in seen:
                raise GraphError(f"duplicate edge ({u},{v})")
            seen.add((u, v))
        # handshake lemma sanity check
        if sum(1 for d in self.degrees() if d % 2 == 1) % 2 != 0:
            raise GraphError("odd number of odd-degree nodes")

    @property
    def m(self) -> int:
        return len(self.edges)

    def degrees(self) -> list[int]:
        deg = [0] * self.n
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    def adjacency(self) -> list[set[int]]:
        adj: list[set[int]] = [set() for _ in range(self.n)]
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return adj

    def has_edge(self, u: int, v: int) -> bool:
        return (min(u, v), max(u, v)) in set(self.edges)

    def is_connected(self) -> bool:
        if self.n == 1:
            return True
        adj = self.adjacency()
        seen = {0}
        stack = [0]
        while stack:
            u = stack.pop()
            for w in adj[u]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == self.n

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(self.n))
        g.add_edges_from(self.edges)
        return g

    @classmethod
    def from_networkx(cls, g: nx.Graph, meta: dict[str, Any] | None = None) -> "Graph":
        nodes = sorted(g.nodes())
        relabel = {node: i for i, node in enumerate(nodes)}
        edges = [(relabel[u], relabel[v]) for u, v in g.edges()]
        return cls(n=len(nodes), edges=tuple(edges), meta=meta or {})

    def permute(self, perm: list[int]) -> "Graph":
        """Relabel nodes: node i becomes perm[i]."""
        return Graph(self.n, tuple((perm[u], perm[v]) for u, v in self.edges), dict(self.meta))


def parity(g: Graph) -> Fraction:
    """Fraction of nodes with even degree."""
    if g.n == 0:
        raise GraphError("empty graph")
    n_even = sum(1 for d in g.degrees() if d % 2 == 0)
    return Fraction(n_even, g.n)


def _check_parity_target(n: int, even_fraction: Fraction) -> int:
    target = Fraction(even_fraction)
    n_even = target * n
    if n_even.denominator != 1:
        raise GraphError(f"parity target {target} not expressible as n_even/{n}")
    n_even = int(n_even)
    if (n - n_even) % 2 != 0:
        raise GraphError(f"n - n_even = {n - n_even} must be even (handshake lemma)")
    return n_even


def _random_connected_capped(n: int, max_degree: int, rng: np.random.Generator) -> list[set[int]]:
    """Random connected graph with bounded degree, as adjacency sets."""
    adj: list[set[int]] = [set() for _ in range(n)]
    order = rng.permutation(n)
    # random growth tree keeps connectivity; attach to a non-saturated node
    attached = [int(order[0])]
    for node in order[1:]:
        node = int(node)
        candidates = [u for u in attached if len(adj[u]) < max_degree]
        host = int(candidates[rng.integers(len(candidates))])
        adj[node].add(host)
        adj[host].add(node)
        attached.append(node)
    # densify with random extra edges under the cap
    extra_attempts = int(rng.integers(n, 3 * n + 1))
    for _ in range(extra_attempts):
        u, v = int(rng.integers(n)), int(rng.integers(n))
        if u == v or v in adj[u]:
            continue
        if len(adj[u]) >= max_degree or len(adj[v]) >= max_degree:
            continue
        adj[u].add(v)
        adj[v].add(u)
    return adj


def _adj_connected(adj: list[set[int]]) -> bool:
    n = len(adj)
    seen = {0}
    stack = [0]
    while stack:
        u = stack.pop()
        for w in adj[u]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == n


def _repair_parity(
    adj: list[set[int]], n_even_target: int, max_degree: int, rng: np.random.Generator
) -> bool:
    """Toggle edges between same-parity node pairs until the even count matches.

    Toggling an edge between two odd nodes turns both even (+2 even);
    between two even nodes, both odd (-2 even).
    """
    n = len(adj)
    for _ in range(200 * n):
        even = [u for u in range(n) if len(adj[u]) % 2 == 0]
        n_even = len(even)
        if n_even == n_even_target:
            return True
        pool = [u for u in range(n) if len(adj[u]) % 2 == 1] if n_even < n_even_target else even
        if len(pool) < 2:
            return False
        i, j = rng.choice(len(pool), size=2, replace=False)
        u, v = pool[int(i)], pool[int(j)]
        if v in adj[u]:
            adj[u].discard(v)
            adj[v].discard(u)
        elif len(adj[u]) < max_degree and len(adj[v]) < max_degree:
            adj[u].add(v)
            adj[v].add(u)
    return False


def generate_random(
    n: int,
    max_degree: int,
    even_fraction: Fraction | float | str,
    seed: int | list[int],
    retries: int = 1000,
) -> Graph:
    """Connected random graph with a prescribed even-degree-node fraction.

    Starts from a random bounded-degree connected graph, then repairs parity
    by toggling edges between same-parity node pairs; the whole construction
    is retried (with a seed-derived stream) until connectivity and parity
    both hold, or the retry budget is exhausted.
    """
    if n < 4:
        raise GraphError("need n >= 4")
    if max_degree < 2:
        raise GraphError("need max_degree >= 2")
    target = Fraction(even_fraction).limit_denominator(10**9)
    n_even_target = _check_parity_target(n, target)
    seed_key = list(seed) if isinstance(seed, (list, tuple)) else [seed]
    for attempt in range(retries):
        rng = np.random.default_rng(seed_key + [attempt])
        adj = _random_connected_capped(n, max_degree, rng)
        if not _repair_parity(adj, n_even_target, max_degree, rng):
            continue
        if not _adj_connected(adj):
            continue
        edges = tuple((u, v) for u in range(n) for v in adj[u] if u < v)
        g = Graph(n, edges, {"class": "random", "seed": seed, "even_fraction": str(target)})
        assert parity(g) == target
        return g
    raise GenerationError(
        f"could not reach parity {target} for n={n}, max_degree={max_degree} "
        f"after {retries} attempts",
        attempts=retries,
    )


def parity_classes(n: int) -> list[Fraction]:
    """Achievable even-degree fractions for n nodes (handshake-lemma spacing)."""
    if n < 1:
        raise GraphError("need n >= 1")
    start = 0 if n % 2 == 0 else 1
    return [Fraction(k, n) for k in range(start, n + 1, 2)]


def stratified_corpus(
    n: int,
    max_degree: int,
    per_class: int,
    seed: int,
    dedup_iterations: int = 3,
    retries: int = 1000,
) -> list[Graph]:
    """Parity-stratified corpus with equal class counts, non-isomorphic by
    WL fingerprint (duplicates are regenerated from fresh seed streams).

    Raises GenerationError when a class cannot supply per_class distinct
    fingerprints within the retry budget (small n with a tight degree cap
    may admit fewer non-isomorphic graphs than requested).
    """
    graphs: list[Graph] = []
    seen: set[str] = set()
    for ci, target in enumerate(parity_classes(n)):
        produced = 0
        salt = 0
        while produced < per_class:
            if salt >= retries:
                raise GenerationError(
                    f"class {target}: only {produced}/{per_class} distinct graphs "
                    f"after {salt} attempts",
                    attempts=salt,
                )
            g = generate_random(n, max_degree, target, seed=[seed, ci, salt])  # type: ignore[arg-type]
            salt += 1
            digest = wl_fingerprint(g, iterations=dedup_iterations)
            if digest in seen:
                continue
            seen.add(digest)
            graphs.append(g)
            produced += 1
    return graphs


def generate_regular(n: int, d: int, seed: int, retries: int = 100) -> Graph:
    """Random d-regular simple graph."""
    if (n * d) % 2 != 0:
        raise GraphError(f"n*d = {n * d} must be even")
    if d >= n:
        raise GraphError("need d < n")
    last: Exception | None = None
    for attempt in range(retries):
        try:
            g = nx.random_regular_graph(d, n, seed=seed + attempt)
        except nx.NetworkXError as exc:  # pairing model can fail, resample
            last = exc
            continue
        if nx.is_connected(g):
            return Graph.from_networkx(g, {"class": "regular", "d": d, "seed": seed})
    raise GenerationError(f"no connected {d}-regular graph on {n} nodes found: {last}", retries)


def generate_watts_strogatz(n: int, k: int, beta_rewire: float, seed: int) -> Graph:
    """Watts-Strogatz ring lattice with rewiring; edge count is preserved."""
    if k % 2 != 0:
        raise GraphError("ring degree k must be even")
    if k >= n:
        raise GraphError("need k < n")
    if not 0.0 <= beta_rewire <= 1.0:
        raise GraphError("beta_rewire must be a probability")
    g = nx.connected_watts_strogatz_graph(n, k, beta_rewire, tries=1000, seed=seed)
    return Graph.from_networkx(g, {"class": "ws", "k": k, "beta": beta_rewire, "seed": seed})


def _digest64(*parts: object) -> int:
    h = hashlib.blake2b(repr(parts).encode(), digest_size=8)
    return int.from_bytes(h.digest(), "big")


def wl_labels(g: Graph, iterations: int) -> list[list[int]]:
    """Color-refinement labels per iteration; iteration 0 is the degree."""
    if iterations < 0:
        raise GraphError("iterations must be >= 0")
    adj = g.adjacency()
    labels = [d for d in g.degrees()]
    out = [list(labels)]
    for it in range(1, iterations + 1):
        labels = [
            _digest64(it, labels[v], tuple(sorted(labels[u] for u in adj[v])))
            for v in range(g.n)
        ]
        out.append(list(labels))
    return out


def wl_fingerprint(g: Graph, iterations: int = 3) -> str:
    """Isomorphism-invariant digest via WL-1 color refinement.

    Colliding non-isomorphic graphs are possible (WL-1 limitation); this is
    a dedup fingerprint, not an isomorphism certificate.
    """
    if iterations < 1:
        raise GraphError("iterations must be >= 1")
    rounds = wl_labels(g, iterations)
    canon = tuple(tuple(sorted(r)) for r in rounds)
    return hashlib.blake2b(repr((g.n, canon)).encode(), digest_size=16).hexdigest()


def line_graph(g: Graph) -> Graph:
    """Line graph: one node per edge, adjacent iff the edges share an endpoint."""
    if g.m < 1:
        raise GraphError("line graph needs at least one edge")
    index = {e: i for i, e in enumerate(g.edges)}
    lg_edges = set()
    incident: list[list[int]] = [[] for _ in range(g.n)]
    for e, i in index.items():
        for node in e:
            incident[node].append(i)
    for node_edges in incident:
        for a in range(len(node_edges)):
            for b in range(a + 1, len(node_edges)):
                i, j = node_edges[a], node_edges[b]
                lg_edges.add((min(i, j), max(i, j)))
    return Graph(g.m, tuple(sorted(lg_edges)), {"line_graph_of": g.meta.get("class", "?")})


def to_json(g: Graph) -> str:
    """Canonical JSON form; edges sorted (u<v, lexicographic)."""
    return json.dumps(
        {"n": g.n, "edges": [list(e) for e in g.edges], "meta": g.meta},
        sort_keys=True,
    )


def from_json(text: str) -> Graph:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GraphError(f"invalid graph JSON: {exc}") from exc
    if not isinstance(obj, dict) or "n" not in obj or "edges" not in obj:
        raise GraphError("graph JSON must contain 'n' and 'edges'")
    edges = tuple((int(u), int(v)) for u, v in obj["edges"])
    seen = set()
    for e in ((min(u, v), max(u, v)) for u, v in edges):
        if e in seen:
            raise GraphError(f"duplicate edge {e}")
        seen.add(e)
    return Graph(int(obj["n"]), edges, obj.get("meta", {}))
