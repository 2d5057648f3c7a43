"""Multi-tree encoder and decoder with bounded-delay rewind decoding.

Encoding starts in T0; a symbol coded at a leaf keeps the next symbol in T0,
one coded at a master (binary) or at an incomplete node with j children
(K-ary) moves the next symbol to the second tree. Decoding traces the stream
as far as possible from the current root, emits the deepest symbol-bearing
node on the path, and rewinds the cursor to just past that node's depth; the
rewind never exceeds 2 code symbols (binary) or 1 (K-ary).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .errors import CorruptStream, InvalidTree, TruncatedStream, UnknownSymbol
from .model import (
    LEAF,
    MASTER,
    INCOMPLETE,
    AifvCode,
    CodeTree,
    ensure_valid_code,
    iter_nodes,
)


class SymbolStream:
    """In-memory sequence of code symbols with a rewindable cursor."""

    def __init__(self, symbols: Sequence[int], arity: int):
        self.symbols = list(symbols)
        self.arity = arity
        self.pos = 0

    def __len__(self) -> int:
        return len(self.symbols)

    def has_next(self) -> bool:
        return self.pos < len(self.symbols)

    def peek(self) -> int:
        return self.symbols[self.pos]

    def advance(self) -> int:
        sym = self.symbols[self.pos]
        self.pos += 1
        return sym

    def rewind(self, count: int) -> None:
        if count < 0 or count > self.pos:
            raise ValueError(f"cannot rewind {count} from position {self.pos}")
        self.pos -= count

    def as_string(self) -> str:
        return "".join(str(s) for s in self.symbols)


@dataclass(frozen=True)
class CodewordEntry:
    word: tuple[int, ...]
    next_tree: int       # family tree index used for the following symbol
    children_count: int  # 0 for leaves, 1 for masters, j for incomplete nodes


@dataclass(frozen=True)
class CodewordTable:
    """Per-tree codeword maps for one code, aligned with code.trees."""

    tree_indices: tuple[int, int]
    entries: tuple[dict[str, CodewordEntry], ...]

    def for_tree(self, tree_index: int) -> dict[str, CodewordEntry]:
        return self.entries[self.tree_indices.index(tree_index)]


def _tree_entries(code: AifvCode, tree: CodeTree) -> dict[str, CodewordEntry]:
    family = code.family
    table: dict[str, CodewordEntry] = {}
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
            raise InvalidTree(f"symbol on a {node.kind} node")
        next_tree = 0 if j == 0 else family.second_index
        table[node.symbol] = CodewordEntry(path, next_tree, j)
    return table


def codeword_table(code: AifvCode) -> CodewordTable:
    """Derive per-tree codewords and tree transitions from the tree shapes."""
    ensure_valid_code(code)
    return CodewordTable(
        code.tree_indices(),
        tuple(_tree_entries(code, tree) for tree in code.trees),
    )


def encode(code: AifvCode, message: Sequence[str]) -> tuple[SymbolStream, list[int]]:
    """Encode a message; returns the stream and the per-symbol tree trace."""
    table = codeword_table(code)
    out: list[int] = []
    trace: list[int] = []
    tree = 0
    for sym in message:
        entries = table.for_tree(tree)
        if sym not in entries:
            raise UnknownSymbol(f"symbol {sym!r} not in the code alphabet")
        entry = entries[sym]
        trace.append(tree)
        out.extend(entry.word)
        tree = entry.next_tree
    return SymbolStream(out, code.arity), trace


def transition_trace(code: AifvCode, message: Sequence[str]) -> list[tuple[int, int]]:
    """Per-symbol (current tree index, children count of the coding node)."""
    table = codeword_table(code)
    out: list[tuple[int, int]] = []
    tree = 0
    for sym in message:
        entries = table.for_tree(tree)
        if sym not in entries:
            raise UnknownSymbol(f"symbol {sym!r} not in the code alphabet")
        entry = entries[sym]
        out.append((tree, entry.children_count))
        tree = entry.next_tree
    return out


def tree_sequence(children_counts: Sequence[int]) -> list[int]:
    """Tree indices visited for a run of coding-node children counts.

    Coding starts in T0; a node with j > 0 children sends the next symbol
    to T_j, a leaf (j = 0) sends it back to T0.
    """
    out: list[int] = []
    tree = 0
    for count in children_counts:
        out.append(tree)
        tree = count if count > 0 else 0
    return out


class Decoder:
    """Single-use decoder; tracks the largest cursor rewind for diagnostics."""

    def __init__(self, code: AifvCode):
        ensure_valid_code(code)
        self.code = code
        self.max_rewind = 0
        self._delay_cap = 2 if code.family.is_binary else 1

    def _decode_one(self, stream: SymbolStream, tree: CodeTree) -> tuple[str, int]:
        node = tree.root
        consumed = 0
        best: Optional[tuple[str, int, int]] = None  # symbol, depth, children count
        if node.symbol is not None:
            best = (node.symbol, 0, _children_count(tree, node, at_root=True))
        while stream.has_next():
            child = node.children.get(stream.peek())
            if child is None:
                break
            stream.advance()
            consumed += 1
            node = child
            if node.symbol is not None:
                best = (node.symbol, consumed, _children_count(tree, node, at_root=False))
        if best is None:
            if not stream.has_next():
                raise TruncatedStream("stream ended before a symbol could be emitted")
            raise CorruptStream(
                f"no symbol-bearing node on the traced path in T{tree.tree_index}"
            )
        symbol, depth, j = best
        rewind = consumed - depth
        assert rewind <= self._delay_cap, (
            f"rewind {rewind} exceeds the decoding-delay bound {self._delay_cap}"
        )
        if rewind > self.max_rewind:
            self.max_rewind = rewind
        stream.rewind(rewind)
        return symbol, (0 if j == 0 else self.code.family.second_index)

    def decode(self, stream: SymbolStream, n_symbols: int) -> list[str]:
        out: list[str] = []
        tree_index = 0
        while len(out) < n_symbols:
            tree = self.code.trees[self.code.position_of(tree_index)]
            symbol, tree_index = self._decode_one(stream, tree)
            out.append(symbol)
        return out

    def decode_until(self, stream: SymbolStream, stop_symbol: str) -> list[str]:
        """Decode until `stop_symbol` is emitted; it is not included."""
        out: list[str] = []
        tree_index = 0
        while True:
            tree = self.code.trees[self.code.position_of(tree_index)]
            symbol, tree_index = self._decode_one(stream, tree)
            if symbol == stop_symbol:
                return out
            out.append(symbol)


def _children_count(tree: CodeTree, node, at_root: bool) -> int:
    if node.kind == LEAF:
        return 0
    if node.kind == MASTER:
        return 1
    return len(node.children) + (tree.tree_index if at_root else 0)


def decode(code: AifvCode, stream: SymbolStream, n_symbols: int) -> list[str]:
    """Decode exactly n_symbols from the stream (the framed symbol count)."""
    return Decoder(code).decode(stream, n_symbols)
