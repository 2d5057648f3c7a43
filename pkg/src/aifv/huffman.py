"""K-ary Huffman baseline and the product-alphabet comparison code."""

from __future__ import annotations

import heapq
from fractions import Fraction

from .analysis import tree_stats
from .errors import CapExceeded, EmptyAlphabet
from .model import (
    COMPLETE,
    LEAF,
    CodeTree,
    Node,
    SourceDistribution,
    make_distribution,
)

_DUMMY = object()


def build_huffman(dist: SourceDistribution, arity: int) -> CodeTree:
    """Standard K-ary Huffman tree.

    Zero-probability dummy symbols pad the alphabet so that
    (|X| - 1) mod (K - 1) == 0; they sink to maximal depth and are pruned
    afterwards, which leaves at most one internal node with missing
    children. Ties are broken by (probability, first-symbol index)
    ascending, so the construction is deterministic.
    """
    n = dist.size
    if n < 2:
        raise EmptyAlphabet("Huffman construction needs at least 2 symbols")
    pad = (arity - 1 - (n - 1) % (arity - 1)) % (arity - 1)

    # heap entries: (probability, first-symbol index, payload)
    heap: list[tuple[Fraction, int, object]] = [
        (p, i, sym) for i, (sym, p) in enumerate(zip(dist.symbols, dist.probs))
    ]
    heap.extend((Fraction(0), n + i, _DUMMY) for i in range(pad))
    heapq.heapify(heap)

    while len(heap) > 1:
        merged = []
        for _ in range(arity):
            merged.append(heapq.heappop(heap))
        prob = sum(e[0] for e in merged)
        first = min(e[1] for e in merged)
        heapq.heappush(heap, (prob, first, tuple(e[2] for e in merged)))
    return CodeTree(arity, 0, _to_node(heap[0][2]))


def _to_node(payload) -> Node:
    if not isinstance(payload, tuple):
        return Node(LEAF, payload)
    children = {}
    for edge, child in enumerate(payload):
        if child is _DUMMY:
            continue  # pruned padding position
        children[edge] = _to_node(child)
    return Node(COMPLETE, None, children)


def product_distribution(dist: SourceDistribution, cap: int = 4096) -> SourceDistribution:
    """I.i.d. pair distribution over ordered two-symbol blocks."""
    n = dist.size
    if n * n > cap:
        raise CapExceeded(f"|X|^2 = {n * n} exceeds the cap {cap}")
    labels = []
    probs = []
    for s, ps in zip(dist.symbols, dist.probs):
        for t, pt in zip(dist.symbols, dist.probs):
            labels.append(f"({s},{t})")
            probs.append(ps * pt)
    return make_distribution(labels, probs)


def huffman_rate(dist: SourceDistribution, arity: int) -> Fraction:
    """Average Huffman codeword length L_H, exactly."""
    return tree_stats(build_huffman(dist, arity), dist).avg_length


def huffman_pair_rate(dist: SourceDistribution, arity: int, cap: int = 4096) -> Fraction:
    """Per-source-symbol rate of the Huffman code built on symbol pairs."""
    return huffman_rate(product_distribution(dist, cap), arity) / 2
