"""Average lengths, tree-switching chain, rate bounds, Monte Carlo cross-check.

For a two-tree code the switching chain has transition masses
q0 = P(T0 hands off to the second tree) and q1 = P(second tree hands back),
giving stationary probabilities Q(T0) = q1/(q0+q1), Q(T1) = q0/(q0+q1) and
the global rate  L = Q(T0) L0 + Q(T1) L1.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction

from .codec import codeword_table
from .model import (
    AifvCode,
    CodeFamily,
    CodeTree,
    SourceDistribution,
    check_alphabet,
    entropy,
    symbol_slots,
)


@dataclass(frozen=True)
class TreeStats:
    """Exact per-tree statistics: average length and per-class symbol mass."""

    avg_length: Fraction                  # L_k = sum p(x) depth(x)
    class_mass: dict[int, Fraction]       # j -> P(symbols on class-j nodes)

    @property
    def leaf_mass(self) -> Fraction:
        return self.class_mass.get(0, Fraction(0))

    @property
    def nonleaf_mass(self) -> Fraction:
        return sum((m for j, m in self.class_mass.items() if j > 0), Fraction(0))


@dataclass(frozen=True)
class ChainSolution:
    Q: tuple[Fraction, Fraction]   # stationary mass of (T0, second tree)
    q0: Fraction                   # switch mass T0 -> second
    q1: Fraction                   # switch mass second -> T0


def tree_stats(tree: CodeTree, dist: SourceDistribution) -> TreeStats:
    check_alphabet(tree, dist)
    slots = symbol_slots(tree)
    probs = dist.as_dict()
    avg = Fraction(0)
    mass: dict[int, Fraction] = {}
    for sym, (depth, j) in slots.items():
        p = probs[sym]
        avg += p * depth
        mass[j] = mass.get(j, Fraction(0)) + p
    return TreeStats(avg, mass)


def stationary(code: AifvCode, dist: SourceDistribution) -> ChainSolution:
    """Closed-form stationary distribution of the two-tree switching chain.

    Degenerate chains: q0 = 0 means the second tree is unreachable, so
    Q = (1, 0); q0 > 0 with q1 = 0 means the chain starts in T0 but absorbs
    in the second tree, so Q = (0, 1).
    """
    s0 = tree_stats(code.trees[0], dist)
    s1 = tree_stats(code.trees[1], dist)
    q0 = s0.nonleaf_mass
    q1 = s1.leaf_mass
    if q0 == 0:
        return ChainSolution((Fraction(1), Fraction(0)), q0, q1)
    if q1 == 0:
        return ChainSolution((Fraction(0), Fraction(1)), q0, q1)
    total = q0 + q1
    return ChainSolution((q1 / total, q0 / total), q0, q1)


def average_length(code: AifvCode, dist: SourceDistribution) -> Fraction:
    """Exact global rate: sum_k Q(T_k) L_k."""
    chain = stationary(code, dist)
    stats = [tree_stats(t, dist) for t in code.trees]
    return sum(
        (q * s.avg_length for q, s in zip(chain.Q, stats)), Fraction(0)
    )


@dataclass(frozen=True)
class LengthBounds:
    per_tree: tuple[tuple[float, float], ...]  # (lower, lower+1) per tree
    global_bounds: tuple[float, float]         # (H_K, H_K + 1)
    l_aifv: float


def length_bounds(
    family: CodeFamily,
    dist: SourceDistribution,
    stats: tuple[TreeStats, TreeStats],
) -> LengthBounds:
    """Entropy-based bounds on L_k and on the global rate.

    Binary: L0 >= H2 - P(masters in T0)(2 - log2 3) and
            L1 >= H2 + P(leaves in T1)(2 - log2 3).
    K-ary tree T_k: L_k >= H_K + sum_j P(class j) log_K((K-j)/(K-k)).
    Each upper bound sits one code symbol above its lower bound, and the
    global rate satisfies H_K <= L < H_K + 1. All comparisons are asserted
    here (tolerance 1e-9).
    """
    arity = family.arity
    h = entropy(dist, arity)
    tol = 1e-9

    lowers: list[float] = []
    for pos, s in enumerate(stats):
        if family.is_binary:
            gap = 2.0 - math.log2(3.0)
            if pos == 0:
                lower = h - float(s.nonleaf_mass) * gap
            else:
                lower = h + float(s.leaf_mass) * gap
        else:
            k = 0 if pos == 0 else family.second_index
            lower = h
            log_k = math.log(arity)
            for j, m in s.class_mass.items():
                lower += float(m) * (math.log(arity - j) - math.log(arity - k)) / log_k
        lowers.append(lower)

    per_tree = []
    for s, lower in zip(stats, lowers):
        l_k = float(s.avg_length)
        assert lower - tol <= l_k < lower + 1 + tol, (
            f"L_k = {l_k} outside [{lower}, {lower + 1})"
        )
        per_tree.append((lower, lower + 1.0))

    q0, q1 = stats[0].nonleaf_mass, stats[1].leaf_mass
    if q0 == 0:
        l_aifv = float(stats[0].avg_length)
    elif q1 == 0:
        l_aifv = float(stats[1].avg_length)
    else:
        l_aifv = float(
            (q1 * stats[0].avg_length + q0 * stats[1].avg_length) / (q0 + q1)
        )
    assert h - tol <= l_aifv < h + 1 + tol, f"L = {l_aifv} outside [H, H+1)"
    return LengthBounds(tuple(per_tree), (h, h + 1.0), l_aifv)


def empirical_rate(
    code: AifvCode, dist: SourceDistribution, n_symbols: int, seed: int
) -> float:
    """Code symbols per source symbol on a seeded i.i.d. message."""
    rate, _ = empirical_rate_stats(code, dist, n_symbols, seed)
    return rate


def empirical_rate_stats(
    code: AifvCode, dist: SourceDistribution, n_symbols: int, seed: int, batches: int = 100
) -> tuple[float, float]:
    """(rate, standard error) with the error taken over batch means, which
    stays honest under the one-step tree-switching dependence."""
    if n_symbols < 1:
        raise ValueError("need at least one symbol")
    check_alphabet(code.trees[0], dist)
    table = codeword_table(code)
    # symbol -> (codeword length, next tuple position) per tree position
    compact = []
    for entries in table.entries:
        compact.append({
            sym: (len(e.word), 0 if e.next_tree == 0 else 1)
            for sym, e in entries.items()
        })
    rng = random.Random(seed)
    weights = [float(p) for p in dist.probs]
    message = rng.choices(dist.symbols, weights=weights, k=n_symbols)

    pos = 0
    total = 0
    batch_totals = []
    batch_size = max(1, n_symbols // batches)
    batch_acc = 0
    batch_n = 0
    for sym in message:
        length, pos = compact[pos][sym]
        total += length
        batch_acc += length
        batch_n += 1
        if batch_n == batch_size:
            batch_totals.append(batch_acc / batch_n)
            batch_acc = 0
            batch_n = 0
    if batch_n:
        batch_totals.append(batch_acc / batch_n)
    rate = total / n_symbols
    if len(batch_totals) > 1:
        mean = sum(batch_totals) / len(batch_totals)
        var = sum((b - mean) ** 2 for b in batch_totals) / (len(batch_totals) - 1)
        stderr = math.sqrt(var / len(batch_totals))
    else:
        stderr = 0.0
    return rate, stderr
