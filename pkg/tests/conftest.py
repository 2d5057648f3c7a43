"""Hand-built reference codes, pinned by known codeword tables and
average lengths; the rest of the suite checks everything against them."""

from fractions import Fraction as F

import pytest

from aifv.model import (
    BINARY,
    TERNARY,
    AifvCode,
    CodeTree,
    complete,
    incomplete,
    leaf,
    make_distribution,
    master,
    t1_root,
)


@pytest.fixture(scope="session")
def uniform5():
    return make_distribution("abcde", [F(1, 5)] * 5)


@pytest.fixture(scope="session")
def uniform4():
    return make_distribution("abcd", [F(1, 4)] * 4)


@pytest.fixture(scope="session")
def dist_45_30_20_05():
    return make_distribution("abcd", ["0.45", "0.3", "0.2", "0.05"])


@pytest.fixture(scope="session")
def dist_80_10_05_05():
    return make_distribution("abcd", ["0.8", "0.1", "0.05", "0.05"])


@pytest.fixture(scope="session")
def dist_90_05_05():
    return make_distribution("abc", ["0.9", "0.05", "0.05"])


@pytest.fixture(scope="session")
def ternary5_code():
    """Ternary pair with codewords T0 = {a:0, b:1, c:2, d:10, e:20} (b, c
    incomplete) and T1 = {a:1, b:10, c:20, d:21, e:22} (a incomplete)."""
    t0 = CodeTree(3, 0, complete({
        0: leaf("a"),
        1: incomplete("b", {0: leaf("d")}),
        2: incomplete("c", {0: leaf("e")}),
    }))
    t1 = CodeTree(3, 1, complete({
        1: incomplete("a", {0: leaf("b")}),
        2: complete({0: leaf("c"), 1: leaf("d"), 2: leaf("e")}),
    }))
    return AifvCode(TERNARY, (t0, t1))


@pytest.fixture(scope="session")
def binary4_code():
    """Binary pair with T0 = {a:0, b:10, c:11 master, d:1100} and
    T1 = {a:01, b:10, c:11 master, d:1100}."""
    t0 = CodeTree(2, 0, complete({
        0: leaf("a"),
        1: complete({0: leaf("b"), 1: master("c", leaf("d"))}),
    }))
    t1 = CodeTree(2, 1, t1_root(
        leaf("a"),
        complete({0: leaf("b"), 1: master("c", leaf("d"))}),
    ))
    return AifvCode(BINARY, (t0, t1))


@pytest.fixture(scope="session")
def ternary4_root_code():
    """Ternary pair whose T0 root is incomplete and carries 'a' (codeword
    empty): T0 = {a:λ, b:00, c:01, d:02}, T1 = {a:1, b:20, c:21, d:22}."""
    t0 = CodeTree(3, 0, incomplete("a", {
        0: complete({0: leaf("b"), 1: leaf("c"), 2: leaf("d")}),
    }))
    t1 = CodeTree(3, 1, complete({
        1: leaf("a"),
        2: complete({0: leaf("b"), 1: leaf("c"), 2: leaf("d")}),
    }))
    return AifvCode(TERNARY, (t0, t1))


@pytest.fixture(scope="session")
def binary3_root_code():
    """Binary pair whose T0 root is a master carrying 'a':
    T0 = {a:λ, b:000, c:001}, T1 = {a:1, b:010, c:011}."""
    t0 = CodeTree(2, 0, master("a", complete({0: leaf("b"), 1: leaf("c")})))
    t1 = CodeTree(2, 1, t1_root(
        complete({0: leaf("b"), 1: leaf("c")}),
        leaf("a"),
    ))
    return AifvCode(BINARY, (t0, t1))
