"""Exact classical MaxCut oracle.

Assignment convention: bit i of the assignment string is the part of node i,
and node 0 is fixed to part 0. Ties are broken by the lexicographically
smallest assignment string.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graphs import Graph

__all__ = ["CutSolution", "SizeCapError", "cut_value", "brute_force_maxcut", "exact_maxcut"]

DEFAULT_CAP = 24
_ENUM_LIMIT = 20


class SizeCapError(ValueError):
    """Instance exceeds the configured exact-solver size cap."""


@dataclass(frozen=True)
class CutSolution:
    value: int
    assignment: str

    def __post_init__(self):
        if set(self.assignment) - {"0", "1"}:
            raise ValueError("assignment must be a bit string")


def cut_value(g: Graph, assignment: str) -> int:
    """Number of edges whose endpoints land in different parts."""
    if len(assignment) != g.n:
        raise ValueError(f"assignment length {len(assignment)} != n = {g.n}")
    bits = assignment
    return sum(1 for u, v in g.edges if bits[u] != bits[v])


def brute_force_maxcut(g: Graph) -> CutSolution:
    """Reference oracle: plain loop over all assignments with node 0 in part 0."""
    best_val = -1
    best_assign = ""
    for mask in range(2 ** (g.n - 1)):
        # node i (i >= 1) at string position i; iterate in lexicographic order
        bits = "0" + format(mask, f"0{g.n - 1}b")
        val = cut_value(g, bits)
        if val > best_val:
            best_val = val
            best_assign = bits
    return CutSolution(best_val, best_assign)


def _enumerate_maxcut(g: Graph) -> CutSolution:
    """Vectorized enumeration over 2^(n-1) assignments."""
    n = g.n
    k = n - 1
    masks = np.arange(2**k, dtype=np.uint32)
    cuts = np.zeros(2**k, dtype=np.int32)
    # string position i of node i>=1 maps to bit (k-1) - (i-1) so that
    # increasing mask order is lexicographic order of the assignment string
    bitpos = [0] + [k - i for i in range(1, n)]
    for u, v in g.edges:
        bu = (masks >> bitpos[u]) & 1 if u > 0 else np.zeros_like(masks)
        bv = (masks >> bitpos[v]) & 1 if v > 0 else np.zeros_like(masks)
        cuts += (bu != bv).astype(np.int32)
    best = int(cuts.max())
    mask = int(np.flatnonzero(cuts == best)[0])
    return CutSolution(best, "0" + format(mask, f"0{k}b"))


def _bnb_maxcut(g: Graph) -> CutSolution:
    """Depth-first branch and bound; bound = fixed cut + all undecided edges."""
    n = g.n
    adj = g.adjacency()
    # edges with both endpoints < i are decided once nodes 0..i-1 are assigned
    undecided_after = [0] * (n + 1)
    for u, v in g.edges:
        undecided_after[max(u, v)] += 1
    remaining = [0] * (n + 1)
    for i in range(n - 1, -1, -1):
        remaining[i] = remaining[i + 1] + undecided_after[i]

    best_val = -1
    best_assign: list[int] = []
    assign = [0] * n

    def descend(i: int, fixed_cut: int) -> None:
        nonlocal best_val, best_assign
        if i == n:
            if fixed_cut > best_val:
                best_val = fixed_cut
                best_assign = assign[:]
            return
        if fixed_cut + remaining[i + 1] + undecided_after[i] <= best_val:
            return
        for bit in (0, 1):  # 0 first keeps lexicographic tie-break
            if i == 0 and bit == 1:
                break
            gained = sum(1 for u in adj[i] if u < i and assign[u] != bit)
            assign[i] = bit
            descend(i + 1, fixed_cut + gained)
        assign[i] = 0

    descend(0, 0)
    return CutSolution(best_val, "".join(map(str, best_assign)))


def exact_maxcut(g: Graph, cap: int = DEFAULT_CAP, method: str = "auto") -> CutSolution:
    """Globally optimal cut; enumeration up to 20 nodes, branch and bound above."""
    if g.n > cap:
        raise SizeCapError(f"n = {g.n} exceeds exact-solver cap {cap}")
    if method == "auto":
        method = "enum" if g.n <= _ENUM_LIMIT else "bnb"
    if method == "enum":
        return _enumerate_maxcut(g)
    if method == "bnb":
        return _bnb_maxcut(g)
    raise ValueError(f"unknown method {method!r}")
