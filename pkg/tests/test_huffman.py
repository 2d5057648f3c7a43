import itertools
import random
from fractions import Fraction as F

import pytest

from aifv.analysis import tree_stats
from aifv.errors import CapExceeded, EmptyAlphabet
from aifv.huffman import (
    build_huffman,
    huffman_pair_rate,
    huffman_rate,
    product_distribution,
)
from aifv.model import (
    entropy,
    family_distribution,
    huffman_family,
    iter_nodes,
    make_distribution,
    validate_tree,
)


def test_huffman_paper_values(uniform5, uniform4, dist_80_10_05_05, dist_45_30_20_05,
                              dist_90_05_05):
    assert huffman_rate(uniform5, 3) == F(8, 5)
    assert huffman_rate(uniform4, 3) == F(3, 2)
    assert huffman_rate(dist_80_10_05_05, 3) == F(11, 10)
    assert huffman_rate(dist_45_30_20_05, 2) == F(9, 5)
    assert huffman_rate(dist_90_05_05, 2) == F(11, 10)


def test_huffman_trees_validate(uniform5, uniform4):
    for dist, k in ((uniform5, 3), (uniform4, 3), (uniform5, 2)):
        tree = build_huffman(dist, k)
        assert validate_tree(tree, huffman_family(k)).ok


def test_huffman_rejects_singleton():
    with pytest.raises(EmptyAlphabet):
        build_huffman(make_distribution("a", [F(1)]), 2)


def test_product_distribution(uniform4, dist_45_30_20_05):
    pairs = product_distribution(uniform4)
    assert pairs.size == 16
    assert set(pairs.probs) == {F(1, 16)}
    skew = product_distribution(dist_45_30_20_05)
    assert skew.prob("(a,a)") == F(81, 400)  # oracle: direct multiplication
    assert sum(skew.probs) == 1


def test_product_cap():
    with pytest.raises(CapExceeded):
        product_distribution(family_distribution("P0", 10), cap=64)


def test_pair_rate_uniform4(uniform4):
    assert huffman_pair_rate(uniform4, 3) == F(43, 32)
    assert F(43, 32) < huffman_rate(uniform4, 3)


def _min_prefix_rate(dist, k, max_depth):
    """Independent oracle: scan all K-ary prefix length vectors (Kraft sum
    <= 1) up to max_depth; the sorted pairing is optimal for a fixed
    multiset, so scanning non-decreasing vectors against descending
    probabilities covers every code."""
    probs = sorted(dist.probs, reverse=True)
    best = None
    n = len(probs)
    for lengths in itertools.combinations_with_replacement(range(1, max_depth + 1), n):
        if sum(F(1, k ** l) for l in lengths) > 1:
            continue
        rate = sum(p * l for p, l in zip(probs, lengths))
        if best is None or rate < best:
            best = rate
    return best


def test_huffman_optimal_ternary_small():
    rng = random.Random(33)
    for n in (2, 3, 4, 5):
        for _ in range(10):
            ws = [rng.randint(1, 9) for _ in range(n)]
            dist = make_distribution(
                [f"s{i}" for i in range(n)], [F(w, sum(ws)) for w in ws]
            )
            assert huffman_rate(dist, 3) == _min_prefix_rate(dist, 3, n + 1)


def test_huffman_optimal_binary_vs_ip():
    from aifv.ip_model import build_ip_huffman_binary
    from aifv.solver import solve_exact

    rng = random.Random(34)
    for n in (2, 3, 4, 5, 6):
        ws = [rng.randint(1, 30) for _ in range(n)]
        dist = make_distribution(
            [f"s{i}" for i in range(n)], [F(w, sum(ws)) for w in ws]
        )
        instance = build_ip_huffman_binary(dist, n + 1)
        assert huffman_rate(dist, 2) == solve_exact(instance).objective


def test_huffman_entropy_bounds():
    for tag in ("P0", "P1", "P2"):
        for n in (2, 5, 9):
            for k in (2, 3):
                dist = family_distribution(tag, n)
                rate = float(huffman_rate(dist, k))
                h = entropy(dist, k)
                assert h - 1e-9 <= rate < h + 1 + 1e-9


def test_dummies_prune_to_single_position(uniform4):
    # even alphabet, ternary: exactly one internal node short of children
    tree = build_huffman(uniform4, 3)
    short = [
        n for _, n in iter_nodes(tree)
        if n.kind == "complete" and len(n.children) < 3
    ]
    assert len(short) == 1
    assert len(short[0].children) == 2
    stats = tree_stats(tree, uniform4)
    assert stats.avg_length == F(3, 2)
