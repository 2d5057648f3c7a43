"""Domain model: source distributions, code trees, families, validation.

A code tree is a rooted K-ary tree whose root-to-node paths spell codewords.
Two families are supported for coding:

* binary -- two trees; symbols live on leaves and on *master* nodes, whose
  single child is a symbol-free *slave* leading to a grandchild via "00"
  (the second tree's root is special: its "0"-child is a slave whose child
  hangs off "1", so no codeword there starts with "00");
* K-ary two-tree (K >= 3), of which ternary is the K=3, j=1 case -- symbols
  live on leaves and on incomplete internal nodes with exactly j children.

All probabilities and weights are exact `fractions.Fraction`; floats appear
only in `entropy`.
"""

from __future__ import annotations

import json
import math
import string
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Mapping, Optional, Sequence

from .errors import (
    AlphabetMismatch,
    BadArity,
    EmptyAlphabet,
    InvalidTree,
    NonPositiveProbability,
    NonUnitSum,
)

# Node kinds.
LEAF = "leaf"
COMPLETE = "complete"
INCOMPLETE = "incomplete"
MASTER = "master"
SLAVE = "slave"
PRUNED = "pruned"

_KINDS = (LEAF, COMPLETE, INCOMPLETE, MASTER, SLAVE, PRUNED)


# ---------------------------------------------------------------------------
# Families


@dataclass(frozen=True)
class CodeFamily:
    """Code family tag: binary, ternary, or K-ary two-tree with parameter j."""

    kind: str  # "binary" | "ternary" | "kary"
    arity: int
    j: Optional[int] = None  # children per incomplete node (K-ary families)

    @property
    def second_index(self) -> int:
        """Index of the second tree (the first is always T0)."""
        return 1 if self.kind == "binary" else self.j

    @property
    def is_binary(self) -> bool:
        return self.kind == "binary"

    def initial_cost_float(self) -> float:
        """Seed cost for the tree-pair iteration (2-log2 3, or 1-log_K(K-j))."""
        if self.kind == "binary":
            return 2.0 - math.log2(3.0)
        return 1.0 - math.log(self.arity - self.j) / math.log(self.arity)

    def label(self) -> str:
        if self.kind == "kary":
            return f"kary(K={self.arity},j={self.j})"
        return self.kind


BINARY = CodeFamily("binary", 2)
TERNARY = CodeFamily("ternary", 3, 1)


def kary_two_tree(arity: int, j: int) -> CodeFamily:
    """Two-tree K-ary family: incomplete nodes have exactly j children.

    The second tree is T_j: its root has K-j children via code symbols
    j..K-1, which is what makes codewords after an incomplete node uniquely
    parseable. At K=3, j=1 this is exactly the ternary family.
    """
    if arity < 3:
        raise BadArity(f"two-tree K-ary family needs K >= 3, got {arity}")
    if not (1 <= j <= arity - 2):
        raise BadArity(f"need 1 <= j <= K-2, got j={j} with K={arity}")
    return CodeFamily("kary", arity, j)


def huffman_family(arity: int) -> CodeFamily:
    if arity < 2:
        raise BadArity(f"Huffman arity must be >= 2, got {arity}")
    return CodeFamily("huffman", arity)


# ---------------------------------------------------------------------------
# Distributions


@dataclass(frozen=True)
class SourceDistribution:
    """Alphabet with exact rational probabilities."""

    symbols: tuple[str, ...]
    probs: tuple[Fraction, ...]

    @property
    def size(self) -> int:
        return len(self.symbols)

    def prob(self, symbol: str) -> Fraction:
        return self.probs[self.symbols.index(symbol)]

    def as_dict(self) -> dict[str, Fraction]:
        return dict(zip(self.symbols, self.probs))


def _to_fraction(value) -> Fraction:
    if isinstance(value, float):
        raise TypeError(
            "float probabilities are inexact; pass Fraction, int, or a "
            "decimal/rational string such as '0.45' or '9/20'"
        )
    return Fraction(value)


def make_distribution(labels: Sequence[str], probs: Sequence) -> SourceDistribution:
    """Validate and build a SourceDistribution with exact probabilities."""
    if len(labels) == 0:
        raise EmptyAlphabet("alphabet must contain at least one symbol")
    if len(labels) != len(probs):
        raise ValueError(f"{len(labels)} labels but {len(probs)} probabilities")
    if len(set(labels)) != len(labels):
        raise ValueError("duplicate symbol labels")
    fracs = tuple(_to_fraction(p) for p in probs)
    for lab, p in zip(labels, fracs):
        if p <= 0:
            raise NonPositiveProbability(f"p({lab}) = {p} is not positive")
    total = sum(fracs)
    if total != 1:
        raise NonUnitSum(f"probabilities sum to {total}, not 1")
    return SourceDistribution(tuple(str(l) for l in labels), fracs)


def default_labels(n: int) -> list[str]:
    """Deterministic labels a..z, aa, ab, ... (spreadsheet style)."""
    letters = string.ascii_lowercase
    out = []
    for i in range(n):
        name = ""
        k = i
        while True:
            name = letters[k % 26] + name
            k = k // 26 - 1
            if k < 0:
                break
        out.append(name)
    return out


def family_distribution(family: str, n: int) -> SourceDistribution:
    """The P0 (uniform), P1 (p_t ~ t), or P2 (p_t ~ t^2) benchmark family."""
    if n < 2:
        raise EmptyAlphabet(f"benchmark distributions need n >= 2, got {n}")
    if family == "P0":
        probs = [Fraction(1, n)] * n
    elif family == "P1":
        a1 = n * (n + 1) // 2
        probs = [Fraction(t, a1) for t in range(1, n + 1)]
    elif family == "P2":
        a2 = sum(t * t for t in range(1, n + 1))
        probs = [Fraction(t * t, a2) for t in range(1, n + 1)]
    else:
        raise ValueError(f"unknown distribution family {family!r}")
    return make_distribution(default_labels(n), probs)


def entropy(dist: SourceDistribution, arity: int) -> float:
    """Base-K Shannon entropy, in floating point."""
    if arity < 2:
        raise BadArity(f"entropy base must be >= 2, got {arity}")
    log_k = math.log(arity)
    return -sum(float(p) * (math.log(p) / log_k) for p in dist.probs)


# ---------------------------------------------------------------------------
# Nodes and trees


@dataclass(frozen=True)
class Node:
    """One tree node. `children` maps code symbols (ints) to child nodes."""

    kind: str
    symbol: Optional[str] = None
    children: Mapping[int, "Node"] = field(default_factory=dict)

    def sorted_children(self) -> list[tuple[int, "Node"]]:
        return sorted(self.children.items())


def leaf(symbol: str) -> Node:
    return Node(LEAF, symbol)


def pruned() -> Node:
    return Node(PRUNED)


def complete(children: Mapping[int, Node]) -> Node:
    return Node(COMPLETE, None, dict(children))


def incomplete(symbol: str, children: Mapping[int, Node]) -> Node:
    return Node(INCOMPLETE, symbol, dict(children))


def slave(child: Node, via: int = 0) -> Node:
    return Node(SLAVE, None, {via: child})


def master(symbol: str, grandchild: Node) -> Node:
    """Master node: symbol-bearing, reaches its grandchild via '00'."""
    return Node(MASTER, symbol, {0: slave(grandchild, via=0)})


def t1_root(under_slave: Node, right: Node) -> Node:
    """Root of a binary second tree: '0'-child is a slave whose child hangs
    off '1' (so the root has no grandchild via '00'), '1'-child is free."""
    return Node(COMPLETE, None, {0: slave(under_slave, via=1), 1: right})


@dataclass(frozen=True)
class CodeTree:
    arity: int
    tree_index: int
    root: Node


@dataclass(frozen=True)
class AifvCode:
    """An ordered pair of code trees: (T0, T_second)."""

    family: CodeFamily
    trees: tuple[CodeTree, CodeTree]

    @property
    def arity(self) -> int:
        return self.family.arity

    def tree_indices(self) -> tuple[int, int]:
        return (0, self.family.second_index)

    def position_of(self, tree_index: int) -> int:
        if tree_index == 0:
            return 0
        if tree_index == self.family.second_index:
            return 1
        raise ValueError(f"code has no tree T{tree_index}")


def iter_nodes(tree: CodeTree) -> Iterator[tuple[tuple[int, ...], Node]]:
    """Yield (path, node) pairs in preorder, children in ascending edge order."""
    stack = [((), tree.root)]
    while stack:
        path, node = stack.pop()
        yield path, node
        for sym, child in reversed(node.sorted_children()):
            stack.append((path + (sym,), child))


def tree_symbols(tree: CodeTree) -> list[str]:
    return [n.symbol for _, n in iter_nodes(tree) if n.symbol is not None]


def symbol_slots(tree: CodeTree) -> dict[str, tuple[int, int]]:
    """Map each symbol to (depth, class j): j=0 for leaves, j=1 for masters,
    j=children-count for incomplete nodes (an incomplete root of T_k counts
    as k + len(children))."""
    slots: dict[str, tuple[int, int]] = {}
    for path, node in iter_nodes(tree):
        if node.symbol is None:
            continue
        if node.kind == LEAF:
            j = 0
        elif node.kind == MASTER:
            j = 1
        elif node.kind == INCOMPLETE:
            j = len(node.children) + (tree.tree_index if path == () else 0)
        else:
            raise InvalidTree(f"symbol {node.symbol!r} on a {node.kind} node")
        if node.symbol in slots:
            raise InvalidTree(f"symbol {node.symbol!r} appears more than once")
        slots[node.symbol] = (len(path), j)
    return slots


def max_depth(tree: CodeTree) -> int:
    return max(len(path) for path, _ in iter_nodes(tree))


# ---------------------------------------------------------------------------
# Validation


@dataclass(frozen=True)
class Violation:
    code: str
    path: str
    message: str

    def __str__(self) -> str:
        return f"[{self.code}] at '{self.path}': {self.message}"


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...]

    @property
    def ok(self) -> bool:
        return not self.violations

    def __str__(self) -> str:
        if self.ok:
            return "valid"
        return "; ".join(str(v) for v in self.violations)


def _path_str(path: tuple[int, ...]) -> str:
    return "".join(str(c) for c in path) or "<root>"


def validate_tree(tree: CodeTree, family: CodeFamily) -> ValidationReport:
    """Check every structural rule of the family; violations are data."""
    bad: list[Violation] = []

    def flag(code: str, path: tuple[int, ...], message: str) -> None:
        bad.append(Violation(code, _path_str(path), message))

    if family.arity != tree.arity and family.kind != "huffman":
        flag("ArityMismatch", (), f"tree arity {tree.arity} != family arity {family.arity}")

    seen: set[str] = set()
    for path, node in iter_nodes(tree):
        if node.symbol is not None:
            if node.symbol in seen:
                flag("DuplicateSymbol", path, f"symbol {node.symbol!r} repeated")
            seen.add(node.symbol)
        for edge in node.children:
            if not (0 <= edge < tree.arity):
                flag("BadEdgeSymbol", path, f"edge {edge} outside 0..{tree.arity - 1}")

    if family.kind == "binary":
        _validate_binary(tree, flag)
    elif family.kind in ("ternary", "kary"):
        _validate_kary(tree, family, flag)
    elif family.kind == "huffman":
        _validate_huffman(tree, flag)
    else:
        flag("UnknownFamily", (), family.kind)
    return ValidationReport(tuple(bad))


def _validate_binary(tree: CodeTree, flag) -> None:
    k = tree.tree_index
    root = tree.root
    if k not in (0, 1):
        flag("BadTreeIndex", (), f"binary tree index must be 0 or 1, got {k}")

    if k == 1:
        if root.kind != COMPLETE or set(root.children) != {0, 1}:
            flag("RootBadShape", (), "second-tree root needs children via '0' and '1'")
        elif root.children[0].kind != SLAVE:
            flag("RootChildNotSlave", (0,), "root's '0'-child must be a slave")
    elif root.kind == LEAF:
        flag("RootIsLeaf", (), "a one-leaf tree cannot drive the two-tree code")
    elif root.kind not in (COMPLETE, MASTER):
        flag("RootBadShape", (), f"T0 root must be complete or master, not {root.kind}")

    for path, node in iter_nodes(tree):
        at_root = path == ()
        if node.kind == LEAF:
            if node.children:
                flag("LeafWithChildren", path, "leaf has children")
            if node.symbol is None:
                flag("LeafWithoutSymbol", path, "leaf carries no symbol")
        elif node.kind == COMPLETE:
            if node.symbol is not None:
                flag("CompleteWithSymbol", path, "complete node carries a symbol")
            if set(node.children) != {0, 1}:
                flag("CompleteBadChildren", path, "complete node needs children '0' and '1'")
        elif node.kind == MASTER:
            if node.symbol is None:
                flag("MasterWithoutSymbol", path, "master carries no symbol")
            if set(node.children) != {0}:
                flag("MasterBadChildren", path, "master has exactly one child via '0'")
            elif node.children[0].kind != SLAVE:
                flag("MasterChildNotSlave", path, "master's child must be a slave")
        elif node.kind == SLAVE:
            if node.symbol is not None:
                flag("SlaveWithSymbol", path, "slave carries no symbol")
            if len(node.children) != 1:
                flag("SlaveBadChild", path, "slave has exactly one child")
            else:
                edge = next(iter(node.children))
                root_slave = k == 1 and path == (0,)
                if root_slave and edge != 1:
                    flag("RootGrandchild00", path, "root slave's child must hang off '1'")
                if not root_slave and edge != 0:
                    flag("SlaveBadChild", path, "slave's child must hang off '0'")
            if not at_root and not root_slave_ok(tree, path):
                flag("SlaveOutOfPlace", path, "slave must sit under a master or the T1 root")
            if at_root:
                flag("RootBadShape", path, "root cannot be a slave")
        else:
            flag("KindNotInFamily", path, f"{node.kind} node not allowed in binary trees")


def root_slave_ok(tree: CodeTree, path: tuple[int, ...]) -> bool:
    """A slave is legal under a master (via '0') or as the T1 root's '0'-child."""
    if tree.tree_index == 1 and path == (0,):
        return True
    if path[-1] != 0:
        return False
    parent = tree.root
    for c in path[:-1]:
        parent = parent.children[c]
    return parent.kind == MASTER


def _validate_kary(tree: CodeTree, family: CodeFamily, flag) -> None:
    arity, j = family.arity, family.j
    k = tree.tree_index
    if k not in (0, family.second_index):
        flag("BadTreeIndex", (), f"tree index must be 0 or {family.second_index}, got {k}")

    pruned_at: dict[int, int] = {}
    for path, node in iter_nodes(tree):
        if node.kind == PRUNED:
            pruned_at[len(path)] = pruned_at.get(len(path), 0) + 1
    for depth, count in sorted(pruned_at.items()):
        if count > arity - 2:
            flag("TooManyPrunedSlots", (),
                 f"{count} pruned slots at depth {depth}, at most {arity - 2}")

    root = tree.root
    if root.kind == COMPLETE:
        want = set(range(k, arity))
        if set(root.children) != want:
            flag("RootBadShape", (), f"complete root of T{k} needs children via {sorted(want)}")
    elif root.kind == INCOMPLETE:
        if k != 0:
            flag("RootBadShape", (), f"root of T{k} cannot be incomplete")
        elif set(root.children) != set(range(j)):
            flag("RootBadShape", (), f"incomplete root needs children via 0..{j - 1}")
    else:
        flag("RootIsLeaf" if root.kind in (LEAF, PRUNED) else "RootBadShape", (),
             f"root of T{k} must be complete or incomplete, not {root.kind}")

    for path, node in iter_nodes(tree):
        at_root = path == ()
        if node.kind == LEAF:
            if node.children:
                flag("LeafWithChildren", path, "leaf has children")
            if node.symbol is None:
                flag("LeafWithoutSymbol", path, "leaf carries no symbol")
        elif node.kind == PRUNED:
            if node.children:
                flag("PrunedWithChildren", path, "pruned slot has children")
            if node.symbol is not None:
                flag("PrunedWithSymbol", path, "pruned slot carries a symbol")
        elif node.kind == COMPLETE:
            if node.symbol is not None:
                flag("CompleteWithSymbol", path, "complete node carries a symbol")
            if not at_root and set(node.children) != set(range(arity)):
                flag("CompleteBadChildren", path,
                     f"complete node needs all {arity} children")
        elif node.kind == INCOMPLETE:
            if node.symbol is None:
                flag("IncompleteWithoutSymbol", path, "incomplete node carries no symbol")
            if not at_root and set(node.children) != set(range(j)):
                flag("IncompleteBadChildren", path,
                     f"incomplete node needs children via 0..{j - 1}")
        else:
            flag("KindNotInFamily", path, f"{node.kind} node not allowed in K-ary trees")


def _validate_huffman(tree: CodeTree, flag) -> None:
    arity = tree.arity
    missing_holders = 0
    for path, node in iter_nodes(tree):
        if node.kind == LEAF:
            if node.children:
                flag("LeafWithChildren", path, "leaf has children")
            if node.symbol is None:
                flag("LeafWithoutSymbol", path, "leaf carries no symbol")
        elif node.kind == COMPLETE:
            if node.symbol is not None:
                flag("CompleteWithSymbol", path, "internal node carries a symbol")
            n_children = len(node.children)
            if not (2 <= n_children <= arity):
                flag("CompleteBadChildren", path,
                     f"internal node has {n_children} children, need 2..{arity}")
            elif n_children < arity:
                missing_holders += 1
        else:
            flag("KindNotInFamily", path, f"{node.kind} node not allowed in Huffman trees")
    if missing_holders > 1:
        flag("TooManyPrunedPositions", (),
             f"{missing_holders} internal nodes with missing children (at most 1)")


def ensure_valid(tree: CodeTree, family: CodeFamily) -> None:
    report = validate_tree(tree, family)
    if not report.ok:
        raise InvalidTree(str(report))


def validate_code(code: AifvCode) -> ValidationReport:
    """Per-tree validation plus cross-tree consistency for an AifvCode."""
    bad: list[Violation] = []
    t0, t1 = code.trees
    expect = code.tree_indices()
    for pos, (tree, idx) in enumerate(zip(code.trees, expect)):
        if tree.tree_index != idx:
            bad.append(Violation("BadTreeIndex", f"trees[{pos}]",
                                 f"expected index {idx}, got {tree.tree_index}"))
        if tree.arity != code.arity:
            bad.append(Violation("ArityMismatch", f"trees[{pos}]",
                                 f"tree arity {tree.arity} != code arity {code.arity}"))
        bad.extend(validate_tree(tree, code.family).violations)
    if sorted(tree_symbols(t0)) != sorted(tree_symbols(t1)):
        bad.append(Violation("AlphabetMismatch", "<code>",
                             "the two trees carry different symbol sets"))
    return ValidationReport(tuple(bad))


def ensure_valid_code(code: AifvCode) -> None:
    report = validate_code(code)
    if not report.ok:
        raise InvalidTree(str(report))


def check_alphabet(tree_or_code, dist: SourceDistribution) -> None:
    tree = tree_or_code.trees[0] if isinstance(tree_or_code, AifvCode) else tree_or_code
    if sorted(tree_symbols(tree)) != sorted(dist.symbols):
        raise AlphabetMismatch("tree symbols differ from the distribution alphabet")


# ---------------------------------------------------------------------------
# Kraft-like weights


def kraft_target(family: CodeFamily, tree_index: int) -> Fraction:
    """Right-hand side of the family's Kraft-like equality for tree T_k."""
    if family.kind == "binary" and tree_index == 1:
        return Fraction(3, 4)
    return Fraction(1)


def kraft_weight(tree: CodeTree, family: CodeFamily) -> Fraction:
    """Left-hand side of the family's Kraft-like equality, exactly.

    Leaves and pruned slots contribute their full slot weight; masters
    contribute 3/4 of it, K-ary incomplete nodes (K-j)/K of it; complete
    internal nodes and slaves contribute nothing themselves. For K-ary
    trees the root's reduced fan-out (K-k children) is folded in so the
    result compares against 1; binary T1 keeps the textbook form whose
    right-hand side is 3/4.
    """
    report = validate_tree(tree, family)
    if not report.ok:
        raise InvalidTree(str(report))
    arity = tree.arity

    if family.kind == "binary":
        total = Fraction(0)
        for path, node in iter_nodes(tree):
            w = Fraction(1, 2 ** len(path))
            if node.kind == LEAF:
                total += w
            elif node.kind == MASTER:
                total += Fraction(3, 4) * w
        return total

    if family.kind == "huffman":
        return sum(
            (Fraction(1, arity ** len(path)) for path, n in iter_nodes(tree) if n.kind == LEAF),
            Fraction(0),
        )

    # K-ary families: children of the root each weigh 1/(K-k); below that
    # every edge divides the parent slot by K.
    k = tree.tree_index

    def slot_weight(path: tuple[int, ...]) -> Fraction:
        if len(path) == 0:
            return Fraction(1)
        return Fraction(1, (arity - k) * arity ** (len(path) - 1))

    total = Fraction(0)
    for path, node in iter_nodes(tree):
        w = slot_weight(path)
        if node.kind in (LEAF, PRUNED):
            total += w
        elif node.kind == INCOMPLETE:
            if path == ():
                # Incomplete root of T_k with K_c = k + children: covers the
                # missing (K - K_c) of its K - k potential children.
                kc = k + len(node.children)
                total += Fraction(arity - kc, arity - k)
            else:
                total += Fraction(arity - len(node.children), arity) * w
    return total


# ---------------------------------------------------------------------------
# Canonical serialization


def _tree_to_obj(tree: CodeTree) -> dict:
    nodes: list[dict] = []

    def visit(node: Node) -> int:
        node_id = len(nodes)
        entry: dict = {"kind": node.kind}
        if node.symbol is not None:
            entry["symbol"] = node.symbol
        entry["children"] = {}
        nodes.append(entry)
        for sym, child in node.sorted_children():
            entry["children"][str(sym)] = visit(child)
        return node_id

    root_id = visit(tree.root)
    return {"arity": tree.arity, "tree_index": tree.tree_index,
            "nodes": nodes, "root": root_id}


def _tree_from_obj(obj: dict) -> CodeTree:
    try:
        nodes = obj["nodes"]
        root_id = obj["root"]
        arity = obj["arity"]
        tree_index = obj["tree_index"]
    except (KeyError, TypeError) as exc:
        raise InvalidTree(f"malformed tree object: missing {exc}") from exc

    def build(node_id: int, seen: frozenset[int]) -> Node:
        if node_id in seen:
            raise InvalidTree("node id cycle in serialized tree")
        try:
            entry = nodes[node_id]
        except (IndexError, TypeError) as exc:
            raise InvalidTree(f"bad node id {node_id}") from exc
        kind = entry.get("kind")
        if kind not in _KINDS:
            raise InvalidTree(f"unknown node kind {kind!r}")
        children = {
            int(edge): build(child_id, seen | {node_id})
            for edge, child_id in entry.get("children", {}).items()
        }
        return Node(kind, entry.get("symbol"), children)

    return CodeTree(int(arity), int(tree_index), build(root_id, frozenset()))


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def serialize_tree(tree: CodeTree) -> str:
    return canonical_json(_tree_to_obj(tree))


def deserialize_tree(text: str) -> CodeTree:
    return _tree_from_obj(json.loads(text))


def _family_to_obj(family: CodeFamily) -> dict:
    obj = {"kind": family.kind, "arity": family.arity}
    if family.j is not None:
        obj["j"] = family.j
    return obj


def _family_from_obj(obj: dict) -> CodeFamily:
    kind = obj.get("kind")
    if kind == "binary":
        return BINARY
    if kind == "ternary":
        return TERNARY
    if kind == "kary":
        return kary_two_tree(int(obj["arity"]), int(obj["j"]))
    raise InvalidTree(f"unknown family kind {kind!r}")


def serialize_code(code: AifvCode, extra: Optional[dict] = None) -> str:
    obj = {
        "family": _family_to_obj(code.family),
        "trees": [_tree_to_obj(t) for t in code.trees],
    }
    if extra:
        obj.update(extra)
    return canonical_json(obj)


def deserialize_code(text: str) -> AifvCode:
    obj = json.loads(text)
    family = _family_from_obj(obj["family"])
    trees = tuple(_tree_from_obj(t) for t in obj["trees"])
    if len(trees) != 2:
        raise InvalidTree(f"expected 2 trees, got {len(trees)}")
    code = AifvCode(family, trees)
    ensure_valid_code(code)
    return code
