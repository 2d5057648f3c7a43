"""Exact 0-1 branch-and-bound solver, tree reconstruction, brute-force oracle.

`solve_exact` certifies a global optimum by exhausting a depth-first search
over per-symbol assignments. Symbols are visited in descending probability,
options per symbol in (depth ascending, leaf before master) order, so runs
are deterministic and ties resolve to the first optimum in that canonical
order. Everything is integer arithmetic: Kraft weights are scaled to a
common denominator, objective coefficients likewise.

Pruning is driven by an exact dynamic program over (symbols left, Kraft
budget left) that ignores only the slot/continuity side constraints; it is
therefore an admissible bound, and it doubles as the budget-reachability
filter. Side constraints are pruned optimistically during the descent and
checked exactly on complete assignments.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Optional, Sequence

from .analysis import average_length
from .errors import CapExceeded, Unconstructible
from .ip_model import IpInstance, VariableKey
from .model import (
    COMPLETE,
    INCOMPLETE,
    LEAF,
    MASTER,
    PRUNED,
    SLAVE,
    AifvCode,
    CodeFamily,
    CodeTree,
    Node,
    SourceDistribution,
    ensure_valid,
    kraft_target,
    kraft_weight,
    serialize_tree,
    symbol_slots,
)

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
TIME_LIMIT = "time_limit"


@dataclass
class SolverSolution:
    status: str
    assignment: Optional[dict[VariableKey, int]]
    objective: Optional[Fraction]
    nodes: int
    wall_time: float

    @property
    def certified(self) -> bool:
        return self.status in (OPTIMAL, INFEASIBLE)


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


def _scale_of(fracs) -> int:
    scale = 1
    for f in fracs:
        scale = _lcm(scale, Fraction(f).denominator)
    return scale


class _Search:
    """Normalized instance plus all precomputed search tables."""

    def __init__(self, instance: IpInstance):
        self.instance = instance
        by_label = {c.label: c for c in instance.constraints}
        kraft = by_label.get("kraft")

        # Assignment groups, visited in descending probability (ties by index).
        groups = []
        grouped: set[VariableKey] = set()
        for c in instance.constraints:
            if not c.label.startswith("assign["):
                continue
            keys = sorted(c.coeffs, key=lambda k: (k.d, k.kind))
            assert c.relation == "eq" and c.rhs == 1
            assert all(c.coeffs[k] == 1 for k in keys)
            groups.append(keys)
            grouped.update(keys)
        probs = instance.dist.probs

        def group_mass(keys):
            return probs[keys[0].t] if keys and keys[0].t >= 0 else Fraction(0)

        order = sorted(range(len(groups)), key=lambda i: (-group_mass(groups[i]), i))
        self.groups = [groups[i] for i in order]

        # Free bounded-integer variables (the z's): zero objective cost.
        self.free = [k for k in instance.variables if k not in grouped]
        assert all(instance.objective.get(k, 0) == 0 for k in self.free)

        w_scale = _scale_of(list(kraft.coeffs.values()) + [kraft.rhs]) if kraft else 1
        self.weight = {
            k: int((kraft.coeffs.get(k, Fraction(0)) if kraft else Fraction(0)) * w_scale)
            for k in instance.variables
        }
        target = int(kraft.rhs * w_scale) if kraft else 0
        shrink = 0
        for w in self.weight.values():
            shrink = gcd(shrink, w)
        shrink = shrink or 1
        if target % shrink:
            self.target = -1  # unreachable; search reports infeasible
            shrink = 1
        else:
            self.target = target // shrink
        self.weight = {k: w // shrink for k, w in self.weight.items()}

        self.cost_scale = _scale_of(instance.objective.values())
        self.cost = {
            k: int(instance.objective.get(k, Fraction(0)) * self.cost_scale)
            for k in instance.variables
        }

        # Side constraints (anything that is not the Kraft or an assignment),
        # each scaled to integers.
        self.sides = []
        for c in instance.constraints:
            if c.label == "kraft" or c.label.startswith("assign["):
                continue
            s = _scale_of(list(c.coeffs.values()) + [c.rhs])
            coeffs = {k: int(v * s) for k, v in c.coeffs.items()}
            self.sides.append((c.relation, coeffs, int(c.rhs * s)))

        # Option tables per group: (key, weight, cost, per-side coeffs).
        self.options = []
        for keys in self.groups:
            opts = []
            for k in keys:
                side_coeffs = tuple(c.get(k, 0) for _, c, _ in self.sides)
                opts.append((k, self.weight[k], self.cost[k], side_coeffs))
            self.options.append(opts)

        # Optimistic side-constraint completions: the least any remaining
        # symbol can contribute, plus the most the free variables can help.
        m = len(self.groups)
        n_sides = len(self.sides)
        self.side_suffix_min = [[0] * n_sides for _ in range(m + 1)]
        for i in range(m - 1, -1, -1):
            for s in range(n_sides):
                best = min(o[3][s] for o in self.options[i])
                self.side_suffix_min[i][s] = self.side_suffix_min[i + 1][s] + best
        self.side_free_min = [0] * n_sides
        for s in range(n_sides):
            _, coeffs, _ = self.sides[s]
            self.side_free_min[s] = sum(
                min(0, coeffs.get(k, 0) * instance.upper[k]) for k in self.free
            )

        # Reachable weight sums of the free variables, per suffix.
        self.free_caps = [instance.upper[k] for k in self.free]
        self.free_weights = [self.weight[k] for k in self.free]
        self.free_suffix_sums: list[set[int]] = [set() for _ in range(len(self.free) + 1)]
        self.free_suffix_sums[len(self.free)] = {0}
        for i in range(len(self.free) - 1, -1, -1):
            base = self.free_suffix_sums[i + 1]
            here = set()
            for count in range(self.free_caps[i] + 1):
                add = count * self.free_weights[i]
                if self.target >= 0 and add > self.target:
                    break
                here.update(b + add for b in base if b + add <= max(self.target, 0))
            self.free_suffix_sums[i] = here

        # Exact Kraft-only completion costs: bound[i][b] = cheapest way for
        # groups i.. plus the free variables to weigh exactly b.
        self.bound: list[dict[int, int]] = [dict() for _ in range(m + 1)]
        self.bound[m] = {b: 0 for b in self.free_suffix_sums[0]}
        cap = max(self.target, 0)
        for i in range(m - 1, -1, -1):
            nxt = self.bound[i + 1]
            here: dict[int, int] = {}
            for key, w, cost, _ in self.options[i]:
                for b, c in nxt.items():
                    nb = b + w
                    if nb > cap:
                        continue
                    nc = c + cost
                    if here.get(nb, nc + 1) > nc:
                        here[nb] = nc
            self.bound[i] = here

    def free_vectors(self, total: int):
        """Free-variable value vectors summing to `total`, canonical order
        (smallest count on the earliest = shallowest variable first)."""

        def rec(i: int, rem: int):
            if i == len(self.free):
                if rem == 0:
                    yield ()
                return
            w = self.free_weights[i]
            for count in range(self.free_caps[i] + 1):
                left = rem - count * w
                if left < 0:
                    break
                if left in self.free_suffix_sums[i + 1]:
                    for rest in rec(i + 1, left):
                        yield (count,) + rest

        return rec(0, total)


def solve_exact(instance: IpInstance, time_limit: Optional[float] = None) -> SolverSolution:
    """Certified optimum of an IpInstance (or INFEASIBLE / TIME_LIMIT)."""
    start = time.monotonic()
    search = _Search(instance)
    m = len(search.groups)
    n_sides = len(search.sides)

    best_cost: Optional[int] = None
    best_choice: Optional[list[int]] = None
    best_free: Optional[tuple[int, ...]] = None
    choice = [0] * m
    side_cur = [0] * n_sides
    nodes = 0
    timed_out = False

    def side_values_ok(free_vec: tuple[int, ...]) -> bool:
        for s, (relation, coeffs, rhs) in enumerate(search.sides):
            val = side_cur[s]
            for k, count in zip(search.free, free_vec):
                if count:
                    val += coeffs.get(k, 0) * count
            if relation == "le" and val > rhs:
                return False
            if relation == "eq" and val != rhs:
                return False
        return True

    def descend(i: int, budget: int, cost: int) -> None:
        nonlocal best_cost, best_choice, best_free, nodes, timed_out
        if timed_out:
            return
        if i == m:
            if budget not in search.free_suffix_sums[0]:
                return
            for vec in search.free_vectors(budget):
                if side_values_ok(vec):
                    if best_cost is None or cost < best_cost:
                        best_cost = cost
                        best_choice = choice[:m].copy()
                        best_free = vec
                    return
            return
        for opt_idx, (key, w, opt_cost, side_coeffs) in enumerate(search.options[i]):
            nodes += 1
            if nodes % 4096 == 0 and time_limit is not None:
                if time.monotonic() - start > time_limit:
                    timed_out = True
            if timed_out:
                return
            nb = budget - w
            if nb < 0:
                continue
            completion = search.bound[i + 1].get(nb)
            if completion is None:
                continue
            nc = cost + opt_cost
            if best_cost is not None and nc + completion >= best_cost:
                continue
            ok = True
            for s in range(n_sides):
                side_cur[s] += side_coeffs[s]
                if (side_cur[s] + search.side_suffix_min[i + 1][s]
                        + search.side_free_min[s] > search.sides[s][2]):
                    ok = False
            if ok:
                choice[i] = opt_idx
                descend(i + 1, nb, nc)
            for s in range(n_sides):
                side_cur[s] -= side_coeffs[s]

    if search.target >= 0:
        descend(0, search.target, 0)
    wall = time.monotonic() - start

    if timed_out:
        objective = (
            Fraction(best_cost, search.cost_scale) if best_cost is not None else None
        )
        assignment = _assemble(search, best_choice, best_free) if best_choice else None
        return SolverSolution(TIME_LIMIT, assignment, objective, nodes, wall)
    if best_cost is None:
        return SolverSolution(INFEASIBLE, None, None, nodes, wall)
    return SolverSolution(
        OPTIMAL,
        _assemble(search, best_choice, best_free),
        Fraction(best_cost, search.cost_scale),
        nodes,
        wall,
    )


def _assemble(
    search: _Search, choice: Sequence[int], free_vec: Sequence[int]
) -> dict[VariableKey, int]:
    assignment = {k: 0 for k in search.instance.variables}
    for i, opt_idx in enumerate(choice):
        assignment[search.options[i][opt_idx][0]] = 1
    for k, count in zip(search.free, free_vec):
        assignment[k] = count
    return assignment


def solution_dump(solution: SolverSolution, instance: IpInstance) -> str:
    """Textual solution listing mirroring the LP-style instance dump."""
    lines = [
        f"\\ status={solution.status} nodes={solution.nodes} "
        f"wall={solution.wall_time:.3f}s",
        f"objective: {solution.objective}",
    ]
    if solution.assignment:
        for key in instance.variables:
            value = solution.assignment[key]
            if value:
                lines.append(f" {key} = {value}")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# Assignment -> tree reconstruction


def _mutable(kind: str, symbol: Optional[str] = None) -> dict:
    return {"kind": kind, "symbol": symbol, "children": {}}


def _freeze(node: dict) -> Node:
    return Node(
        node["kind"],
        node["symbol"],
        {edge: _freeze(child) for edge, child in node["children"].items()},
    )


def _per_depth(solution_assignment, depth: int, labels) -> tuple[list, list, list]:
    u_syms = [[] for _ in range(depth + 1)]
    v_syms = [[] for _ in range(depth + 1)]
    z_count = [0] * (depth + 1)
    for key, value in sorted(solution_assignment.items()):
        if not value:
            continue
        if key.kind == "u":
            u_syms[key.d].append(labels[key.t])
        elif key.kind == "v":
            v_syms[key.d].append(labels[key.t])
        else:
            z_count[key.d] = value
    return u_syms, v_syms, z_count


def _pack_binary(tree_index: int, depth: int, u_syms, v_syms) -> CodeTree:
    """Left-packed level sweep: grandchild slots first, then leaves, then
    masters, remaining open edges become complete expansions."""
    positions: list[list[tuple[dict, int]]] = [[] for _ in range(depth + 3)]

    def place_master(symbol: str, parent_slot: Optional[tuple[dict, int]], d: int) -> dict:
        node = _mutable(MASTER, symbol)
        sl = _mutable(SLAVE)
        node["children"][0] = sl
        if parent_slot is not None:
            parent, edge = parent_slot
            parent["children"][edge] = node
        if d + 2 > depth:
            raise Unconstructible(f"master at depth {d} has no room for its grandchild")
        positions[d + 2].append((sl, 0))
        return node

    if tree_index == 1:
        root = _mutable(COMPLETE)
        sl = _mutable(SLAVE)
        root["children"][0] = sl
        positions[1].append((root, 1))
        positions[2].append((sl, 1))
    elif v_syms[0]:
        root = place_master(v_syms[0][0], None, 0)
    else:
        root = _mutable(COMPLETE)
        positions[1].extend([(root, 0), (root, 1)])

    for d in range(1, depth + 1):
        slots = positions[d]
        needed = len(u_syms[d]) + len(v_syms[d])
        if needed > len(slots):
            raise Unconstructible(f"{needed} symbols but {len(slots)} slots at depth {d}")
        it = iter(slots)
        for symbol in u_syms[d]:
            parent, edge = next(it)
            parent["children"][edge] = _mutable(LEAF, symbol)
        for symbol in v_syms[d]:
            place_master(symbol, next(it), d)
        for parent, edge in it:
            if d == depth:
                raise Unconstructible(f"open edge left at the depth bound {depth}")
            node = _mutable(COMPLETE)
            parent["children"][edge] = node
            positions[d + 1].extend([(node, 0), (node, 1)])
    if positions[depth + 1] or positions[depth + 2]:
        raise Unconstructible("pending slots below the depth bound")
    return CodeTree(2, tree_index, _freeze(root))


def _pack_kary(
    family: CodeFamily, tree_index: int, depth: int, u_syms, v_syms, z_count
) -> CodeTree:
    arity, j = family.arity, family.j
    positions: list[list[tuple[dict, int]]] = [[] for _ in range(depth + 2)]

    if tree_index != 0:
        root = _mutable(COMPLETE)
        positions[1].extend((root, e) for e in range(tree_index, arity))
    elif v_syms[0]:
        root = _mutable(INCOMPLETE, v_syms[0][0])
        positions[1].extend((root, e) for e in range(j))
    else:
        root = _mutable(COMPLETE)
        positions[1].extend((root, e) for e in range(arity))

    for d in range(1, depth + 1):
        slots = positions[d]
        needed = len(u_syms[d]) + len(v_syms[d]) + z_count[d]
        if needed > len(slots):
            raise Unconstructible(f"{needed} nodes but {len(slots)} slots at depth {d}")
        it = iter(slots)
        for symbol in u_syms[d]:
            parent, edge = next(it)
            parent["children"][edge] = _mutable(LEAF, symbol)
        for symbol in v_syms[d]:
            parent, edge = next(it)
            node = _mutable(INCOMPLETE, symbol)
            parent["children"][edge] = node
            if d + 1 > depth:
                raise Unconstructible(f"incomplete node at depth {d} has no room")
            positions[d + 1].extend((node, e) for e in range(j))
        for _ in range(z_count[d]):
            parent, edge = next(it)
            parent["children"][edge] = _mutable(PRUNED)
        for parent, edge in it:
            if d == depth:
                raise Unconstructible(f"open edge left at the depth bound {depth}")
            node = _mutable(COMPLETE)
            parent["children"][edge] = node
            positions[d + 1].extend((node, e) for e in range(arity))
    if positions[depth + 1]:
        raise Unconstructible("pending slots below the depth bound")
    return CodeTree(arity, tree_index, _freeze(root))


def solution_to_tree(solution: SolverSolution, instance: IpInstance) -> CodeTree:
    """Concrete tree for a feasible assignment, validated and cross-checked
    against the Kraft equality and the objective decomposition L + C q."""
    if solution.assignment is None:
        raise Unconstructible(f"no assignment available (status {solution.status})")
    labels = instance.dist.symbols
    u_syms, v_syms, z_count = _per_depth(solution.assignment, instance.depth, labels)
    if instance.family.is_binary:
        tree = _pack_binary(instance.tree_index, instance.depth, u_syms, v_syms)
    else:
        tree = _pack_kary(
            instance.family, instance.tree_index, instance.depth, u_syms, v_syms, z_count
        )
    ensure_valid(tree, instance.family)
    assert kraft_weight(tree, instance.family) == kraft_target(
        instance.family, instance.tree_index
    )
    slots = symbol_slots(tree)
    probs = instance.dist.as_dict()
    rebuilt = sum(
        (probs[s] * (d + (instance.cost if cls > 0 else 0)) for s, (d, cls) in slots.items()),
        Fraction(0),
    )
    if solution.objective is not None:
        assert rebuilt == solution.objective, "tree does not reproduce the objective"
    return tree


# ---------------------------------------------------------------------------
# Brute-force oracle over whole tree pairs


_SHAPE_CACHE: dict[tuple, dict] = {}


def _binary_shapes(tree_index: int, n: int, depth: int) -> dict:
    """All per-depth (leaf, master) count profiles of valid binary trees with
    n symbol slots and depth <= `depth`, keyed by the slot multiset."""
    out: dict[tuple, tuple] = {}

    def close(profile, slots, placed):
        if placed != n:
            return
        key = tuple(sorted(slots))
        out.setdefault(key, profile)

    def rec(d, free, pending, placed, profile, slots):
        # Every open edge and every pending grandchild slot needs a symbol.
        if placed + free + pending > n:
            return
        if d > depth:
            if free == 0 and pending == 0:
                close(profile, slots, placed)
            return
        if free == 0 and pending == 0:
            close(profile, slots, placed)
            return
        for leaves in range(min(free, n - placed) + 1):
            max_masters = min(free - leaves, n - placed - leaves)
            if d + 2 > depth:
                max_masters = 0
            for masters in range(max_masters + 1):
                internal = free - leaves - masters
                if d == depth and internal:
                    continue
                rec(
                    d + 1,
                    2 * internal + pending,
                    masters,
                    placed + leaves + masters,
                    profile + ((leaves, masters),),
                    slots + ((d, 0),) * leaves + ((d, 1),) * masters,
                )

    if tree_index == 0:
        rec(1, 2, 0, 0, (("root", "complete"),), ())
        if depth >= 2:
            # Master root: null codeword, grandchild slot at depth 2.
            rec(1, 0, 1, 1, (("root", "master"),), ((0, 1),))
    else:
        # Second-tree root: '1' child open at depth 1, the root slave's
        # child open at depth 2.
        def rec_t1(d, free, pending, placed, profile, slots, extra2):
            if placed + free + pending + extra2 > n:
                return
            if d > depth or (free == 0 and pending == 0 and extra2 == 0):
                if free == 0 and pending == 0 and extra2 == 0:
                    close(profile, slots, placed)
                return
            for leaves in range(min(free, n - placed) + 1):
                max_masters = min(free - leaves, n - placed - leaves)
                if d + 2 > depth:
                    max_masters = 0
                for masters in range(max_masters + 1):
                    internal = free - leaves - masters
                    if d == depth and internal:
                        continue
                    rec_t1(
                        d + 1,
                        2 * internal + pending + (extra2 if d == 1 else 0),
                        masters,
                        placed + leaves + masters,
                        profile + ((leaves, masters),),
                        slots + ((d, 0),) * leaves + ((d, 1),) * masters,
                        0 if d == 1 else extra2,
                    )

        rec_t1(1, 1, 0, 0, (("root", "complete"),), (), 1)
    return out


def _kary_shapes(family: CodeFamily, tree_index: int, n: int, depth: int) -> dict:
    arity, j = family.arity, family.j
    zcap = arity - 2
    out: dict[tuple, tuple] = {}

    def close(profile, slots, placed):
        if placed != n:
            return
        key = tuple(sorted(slots))
        out.setdefault(key, profile)

    def rec(d, free, placed, profile, slots):
        if placed + free - zcap * (depth - d + 1) > n:
            return
        if d > depth or free == 0:
            if free == 0:
                close(profile, slots, placed)
            return
        for leaves in range(min(free, n - placed) + 1):
            max_inc = min(free - leaves, n - placed - leaves)
            if d + 1 > depth:
                max_inc = 0
            for incs in range(max_inc + 1):
                for z in range(min(zcap, free - leaves - incs) + 1):
                    internal = free - leaves - incs - z
                    if d == depth and internal:
                        continue
                    rec(
                        d + 1,
                        arity * internal + j * incs,
                        placed + leaves + incs,
                        profile + ((leaves, incs, z),),
                        slots + ((d, 0),) * leaves + ((d, j),) * incs,
                    )

    if tree_index == 0:
        rec(1, arity, 0, (("root", "complete"),), ())
        if depth >= 1 and n >= 1:
            rec(1, j, 1, (("root", "v"),), ((0, j),))
    else:
        rec(1, arity - tree_index, 0, (("root", "complete"),), ())
    return out


def _shapes(family: CodeFamily, tree_index: int, n: int, depth: int) -> dict:
    key = (family.kind, family.arity, family.j, tree_index, n, depth)
    if key not in _SHAPE_CACHE:
        if family.is_binary:
            _SHAPE_CACHE[key] = _binary_shapes(tree_index, n, depth)
        else:
            _SHAPE_CACHE[key] = _kary_shapes(family, tree_index, n, depth)
    return _SHAPE_CACHE[key]


def _materialize(
    family: CodeFamily,
    tree_index: int,
    depth: int,
    profile: tuple,
    ordering: tuple,
    labels: Sequence[str],
) -> CodeTree:
    u_syms = [[] for _ in range(depth + 1)]
    v_syms = [[] for _ in range(depth + 1)]
    z_count = [0] * (depth + 1)
    if not family.is_binary:
        for d, counts in enumerate(profile[1:], start=1):
            z_count[d] = counts[2]
    for t, (d, cls) in enumerate(ordering):
        if cls == 0:
            u_syms[d].append(labels[t])
        else:
            v_syms[d].append(labels[t])
    if family.is_binary:
        return _pack_binary(tree_index, depth, u_syms, v_syms)
    return _pack_kary(family, tree_index, depth, u_syms, v_syms, z_count)


def _role_candidates(
    family: CodeFamily, tree_index: int, dist: SourceDistribution, depth: int
) -> dict:
    """(L, q) -> canonical (multiset, ordering) over all valid trees.

    q is the transition mass that matters for the role: symbols on non-leaf
    nodes for T0, symbols on leaves for the second tree.
    """
    n = dist.size
    shapes = _shapes(family, tree_index, n, depth)
    scale = _scale_of(dist.probs)
    mass = [int(p * scale) for p in dist.probs]
    found: dict[tuple[int, int], tuple] = {}
    for multiset, profile in shapes.items():
        for ordering in sorted(set(itertools.permutations(multiset))):
            l_num = sum(a * slot[0] for a, slot in zip(mass, ordering))
            if tree_index == 0:
                q_num = sum(a for a, slot in zip(mass, ordering) if slot[1] > 0)
            else:
                q_num = sum(a for a, slot in zip(mass, ordering) if slot[1] == 0)
            key = (l_num, q_num)
            candidate = (multiset, ordering, profile)
            if key not in found or candidate < found[key]:
                found[key] = candidate
    return {"scale": scale, "entries": found}


def brute_force_pair(
    dist: SourceDistribution,
    family: CodeFamily,
    depth: int,
    max_symbols: int = 5,
    max_depth: int = 4,
) -> tuple[AifvCode, Fraction]:
    """Global minimum of the average rate over every valid tree pair.

    Enumerates per-depth shape profiles (arrangement within a level cannot
    change lengths, transition masses, or validity), pairs them through the
    two-tree chain formula, materializes the winners, and tie-breaks on the
    serialized tree pair. Deliberately independent of the IP machinery.
    """
    if dist.size > max_symbols:
        raise CapExceeded(
            f"|X| = {dist.size} exceeds the brute-force cap {max_symbols}; "
            "raise max_symbols explicitly if you really want this"
        )
    if depth > max_depth:
        raise CapExceeded(
            f"depth {depth} exceeds the brute-force cap {max_depth}; "
            "raise max_depth explicitly if you really want this"
        )
    second = family.second_index
    side0 = _role_candidates(family, 0, dist, depth)
    side1 = _role_candidates(family, second, dist, depth)
    scale = side0["scale"]

    best: Optional[Fraction] = None
    tied: list[tuple] = []
    for (l0, q0), cand0 in side0["entries"].items():
        for (l1, q1), cand1 in side1["entries"].items():
            if q0 == 0:
                value = Fraction(l0, scale)
            elif q1 == 0:
                value = Fraction(l1, scale)
            else:
                value = Fraction(q1 * l0 + q0 * l1, scale * (q0 + q1))
            if best is None or value < best:
                best = value
                tied = [(cand0, cand1)]
            elif value == best:
                tied.append((cand0, cand1))

    if best is None:
        raise Unconstructible("no valid tree pair at this depth")

    best_pair = None
    best_key = None
    for cand0, cand1 in tied:
        t0 = _materialize(family, 0, depth, cand0[2], cand0[1], dist.symbols)
        t1 = _materialize(family, second, depth, cand1[2], cand1[1], dist.symbols)
        key = (serialize_tree(t0), serialize_tree(t1))
        if best_key is None or key < best_key:
            best_key = key
            best_pair = (t0, t1)

    code = AifvCode(family, best_pair)
    assert average_length(code, dist) == best
    return code, best
