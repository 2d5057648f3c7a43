"""Iterated cost update: solve the two tree problems, recompute the master /
incomplete-node cost C = (L1 - L0)/(q0 + q1), and repeat until C repeats.

At the fixed point the tree pair is globally optimal; the global rate
strictly decreases on every iteration that changes C, so the loop
terminates. The fixed-point test is exact rational equality and starts at
the second iteration (the seed cost is a dyadic approximation of an
irrational, so a first-iteration match would be a fluke, not a fixed point);
a verbatim tree-pair repeat also stops the loop as a belt-and-braces guard.
"""

from __future__ import annotations

import csv
import io
import time
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Optional

from .analysis import tree_stats
from .errors import DegenerateChain, DepthSaturated, MaxIterExceeded, TimeLimitExceeded
from .ip_model import build_instance, default_depth, default_initial_cost
from .model import (
    AifvCode,
    CodeFamily,
    CodeTree,
    SourceDistribution,
    max_depth,
    serialize_tree,
)
from .solver import OPTIMAL, solution_to_tree, solve_exact


@dataclass(frozen=True)
class CostState:
    """One iterate: updated cost plus the tree pair's exact statistics."""

    m: int
    C: Optional[Fraction]  # cost after this iteration's update
    L0: Fraction
    L1: Fraction
    q0: Fraction
    q1: Fraction
    L_aifv: Fraction


def cost_update(state: CostState) -> Fraction:
    """C = (L1 - L0) / (q0 + q1), exactly."""
    if state.q0 + state.q1 == 0:
        raise DegenerateChain("q0 + q1 = 0; cost update undefined")
    return (state.L1 - state.L0) / (state.q0 + state.q1)


def _rate(L0, L1, q0, q1) -> Fraction:
    if q0 == 0:
        return L0
    if q1 == 0:
        return L1
    return (q1 * L0 + q0 * L1) / (q0 + q1)


@dataclass
class OptimizeResult:
    code: AifvCode
    trace: list[CostState]
    solver_nodes: int
    wall_time: float

    @property
    def l_aifv(self) -> Fraction:
        return self.trace[-1].L_aifv

    @property
    def iterations(self) -> int:
        return len(self.trace)


def optimize(
    dist: SourceDistribution,
    family: CodeFamily,
    depth: Optional[int] = None,
    initial_cost: Optional[Fraction] = None,
    max_iter: int = 100,
    time_limit: Optional[float] = None,
    single_pass: bool = False,
) -> OptimizeResult:
    """Run the cost iteration to its fixed point and return the optimal pair.

    `depth` defaults to 2 ceil(log_K |X|) + 4; when defaulted, a solution
    that actually uses depth D raises DepthSaturated since the bound may
    then be truncating the optimum (callers passing an explicit depth are
    trusted). `single_pass` stops after the first solve, which is already
    near-optimal under the default seed cost.
    """
    defaulted_depth = depth is None
    if depth is None:
        depth = default_depth(family, dist)
    cost = Fraction(initial_cost) if initial_cost is not None else default_initial_cost(family)

    start = time.monotonic()
    trace: list[CostState] = []
    seen_pairs: set[tuple[str, str]] = set()
    total_nodes = 0
    code: Optional[AifvCode] = None

    for m in range(1, max_iter + 1):
        trees: list[CodeTree] = []
        for role in ("T0", "T1"):
            instance = build_instance(family, dist, depth, cost, role)
            solution = solve_exact(instance, time_limit)
            total_nodes += solution.nodes
            if solution.status != OPTIMAL:
                raise TimeLimitExceeded(
                    f"solver returned {solution.status} on iteration {m} ({role})"
                )
            tree = solution_to_tree(solution, instance)
            if defaulted_depth and max_depth(tree) >= depth:
                raise DepthSaturated(
                    f"optimal {role} uses the depth bound {depth}; pass a larger depth"
                )
            trees.append(tree)
        code = AifvCode(family, (trees[0], trees[1]))

        s0 = tree_stats(trees[0], dist)
        s1 = tree_stats(trees[1], dist)
        q0, q1 = s0.nonleaf_mass, s1.leaf_mass
        l_aifv = _rate(s0.avg_length, s1.avg_length, q0, q1)
        state = CostState(m, None, s0.avg_length, s1.avg_length, q0, q1, l_aifv)

        if m >= 2:
            prev = trace[-1]
            # The m-th trees minimize L + C q (resp. L - C q) at the previous
            # cost, so plugging in the previous pair bounds both objectives.
            assert state.L0 + cost * state.q0 <= prev.L_aifv, (
                "T0 objective failed to improve on the previous pair"
            )
            assert state.L1 - cost * state.q1 <= prev.L_aifv, (
                "T1 objective failed to improve on the previous pair"
            )

        if q0 + q1 == 0:
            # Prefix code in T0 and an unreachable, leaf-free second tree:
            # no cost update exists and no switch ever happens.
            trace.append(replace(state, C=cost))
            break
        new_cost = cost_update(state)
        state = replace(state, C=new_cost)
        trace.append(state)

        if single_pass:
            break
        if m >= 2:
            prev = trace[-2]
            if new_cost != prev.C:
                # Strictness needs the binding transition mass to be positive
                # (a cost drop bites through q0, a rise through q1); with a
                # degenerate mass the rate can only stay put, never grow.
                strict = (new_cost < prev.C and state.q0 > 0) or (
                    new_cost > prev.C and state.q1 > 0
                )
                if strict:
                    assert state.L_aifv < prev.L_aifv, (
                        "rate must strictly decrease whenever the cost changes"
                    )
                else:
                    assert state.L_aifv <= prev.L_aifv, "rate must never increase"
        if m >= 2 and new_cost == trace[-2].C:
            break
        pair_key = (serialize_tree(trees[0]), serialize_tree(trees[1]))
        if pair_key in seen_pairs:
            break
        seen_pairs.add(pair_key)
        cost = new_cost
    else:
        raise MaxIterExceeded(f"no fixed point after {max_iter} iterations")

    return OptimizeResult(code, trace, total_nodes, time.monotonic() - start)


def trace_csv(trace: list[CostState]) -> str:
    """CSV export of the iteration trace, exact values as rational strings."""
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["m", "C", "L0", "L1", "q0", "q1", "L_AIFV"])
    for s in trace:
        writer.writerow([s.m, s.C, s.L0, s.L1, s.q0, s.q1, s.L_aifv])
    return buf.getvalue()
