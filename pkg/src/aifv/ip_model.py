"""Exact-rational 0-1 integer-program builders for optimal code trees.

Variables: u[t,d] = 1 if symbol t sits on a leaf of depth d, v[t,d] = 1 if it
sits on a master (binary) or incomplete (K-ary) node of depth d, and for
K-ary trees bounded-integer z[d] counting pruned (symbol-free) leaf slots at
depth d. Each instance carries one Kraft-type equality, one assignment
equality per symbol, and per-depth slot/continuity inequalities that make
every feasible point correspond to a constructible tree.

v variables stop at depth D-2 (binary) or D-1 (K-ary): a deeper master or
incomplete node would need descendants beyond the depth bound, so no valid
tree of depth <= D ever uses one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional

from .errors import DepthTooSmall, EmptyAlphabet
from .model import BINARY, TERNARY, CodeFamily, SourceDistribution, kary_two_tree

ROLES = ("T0", "T1")


@dataclass(frozen=True, order=True)
class VariableKey:
    kind: str  # "u" | "v" | "z"
    t: int     # symbol index; -1 for z
    d: int     # depth

    def __str__(self) -> str:
        if self.kind == "z":
            return f"z[{self.d}]"
        return f"{self.kind}[{self.t},{self.d}]"


@dataclass(frozen=True)
class LinearConstraint:
    label: str
    coeffs: Mapping[VariableKey, Fraction]
    relation: str  # "eq" | "le"
    rhs: Fraction


@dataclass(frozen=True)
class IpInstance:
    family: CodeFamily
    role: str             # "T0" | "T1" (position in the tree pair)
    tree_index: int
    depth: int
    cost: Fraction
    dist: SourceDistribution
    variables: tuple[VariableKey, ...]
    upper: Mapping[VariableKey, int]
    objective: Mapping[VariableKey, Fraction]
    constraints: tuple[LinearConstraint, ...]

    def constraint(self, label: str) -> LinearConstraint:
        for c in self.constraints:
            if c.label == label:
                return c
        raise KeyError(label)


def dyadic_approx(x: float, bits: int = 40) -> Fraction:
    """Nearest multiple of 2^-bits; error < 2^-bits."""
    scale = 1 << bits
    return Fraction(round(x * scale), scale)


def default_initial_cost(family: CodeFamily) -> Fraction:
    """Seed cost (2 - log2 3, or 1 - log_K(K-j)) as a 40-bit dyadic rational."""
    return dyadic_approx(family.initial_cost_float())


def _check_role(role: str) -> None:
    if role not in ROLES:
        raise ValueError(f"role must be one of {ROLES}, got {role!r}")


def build_ip_huffman_binary(dist: SourceDistribution, depth: int) -> IpInstance:
    """Depth-bounded binary Huffman problem: minimize sum p_t d_t under the
    tight Kraft equality, one leaf depth per symbol."""
    n = dist.size
    if n < 2:
        raise EmptyAlphabet("need at least 2 symbols")
    if depth < math.ceil(math.log2(n)):
        raise DepthTooSmall(f"D={depth} cannot hold {n} leaves")
    variables = [VariableKey("u", t, d) for t in range(n) for d in range(1, depth + 1)]
    objective = {
        VariableKey("u", t, d): dist.probs[t] * d
        for t in range(n)
        for d in range(1, depth + 1)
    }
    kraft = LinearConstraint(
        "kraft",
        {VariableKey("u", t, d): Fraction(1, 2 ** d)
         for t in range(n) for d in range(1, depth + 1)},
        "eq",
        Fraction(1),
    )
    assigns = [
        LinearConstraint(
            f"assign[{t}]",
            {VariableKey("u", t, d): Fraction(1) for d in range(1, depth + 1)},
            "eq",
            Fraction(1),
        )
        for t in range(n)
    ]
    return IpInstance(
        family=BINARY, role="T0", tree_index=0, depth=depth, cost=Fraction(0),
        dist=dist, variables=tuple(variables),
        upper={v: 1 for v in variables},
        objective=objective, constraints=tuple([kraft] + assigns),
    )


def build_ip_binary(
    dist: SourceDistribution, depth: int, cost: Fraction, role: str
) -> IpInstance:
    """Binary tree problem for one half of the pair.

    T0: leaves and masters from depth 0 (a depth-0 master is the
    null-codeword root), Kraft weight 1. T1: depths start at 1 and the
    Kraft weight is 3/4. Slot constraints guarantee each master of depth d
    finds a slave at d+1 and a grandchild at d+2.
    """
    _check_role(role)
    n = dist.size
    if n < 2:
        raise EmptyAlphabet("need at least 2 symbols")
    if depth < 2:
        raise DepthTooSmall("binary tree problems need D >= 2")
    cost = Fraction(cost)
    if cost < 0:
        raise ValueError(f"cost must be nonnegative, got {cost}")
    d_min = 0 if role == "T0" else 1

    u_keys = [VariableKey("u", t, d) for t in range(n) for d in range(d_min, depth + 1)]
    v_keys = [VariableKey("v", t, d) for t in range(n) for d in range(d_min, depth - 1)]
    variables = tuple(u_keys + v_keys)

    objective: dict[VariableKey, Fraction] = {}
    for key in u_keys:
        if key.d:
            objective[key] = dist.probs[key.t] * key.d
    for key in v_keys:
        objective[key] = dist.probs[key.t] * (key.d + cost)

    kraft_coeffs: dict[VariableKey, Fraction] = {}
    for key in u_keys:
        kraft_coeffs[key] = Fraction(1, 2 ** key.d)
    for key in v_keys:
        kraft_coeffs[key] = Fraction(3, 4) * Fraction(1, 2 ** key.d)
    kraft = LinearConstraint(
        "kraft", kraft_coeffs, "eq",
        Fraction(1) if role == "T0" else Fraction(3, 4),
    )

    assigns = [
        LinearConstraint(
            f"assign[{t}]",
            {k: Fraction(1) for k in variables if k.t == t},
            "eq",
            Fraction(1),
        )
        for t in range(n)
    ]

    # Masters of depth d need a node or leaf at depth d+2; half a slot is
    # already spoken for by each master of depth d+1.
    slots = []
    for d in range(d_min, depth - 1):
        coeffs: dict[VariableKey, Fraction] = {}
        for t in range(n):
            key = VariableKey("v", t, d)
            if key in kraft_coeffs:
                coeffs[key] = Fraction(1)
            key = VariableKey("v", t, d + 1)
            if key in kraft_coeffs:
                coeffs[key] = Fraction(1, 2)
        for ell in range(d + 2, depth + 1):
            scale = Fraction(1, 2 ** (ell - d - 2))
            for t in range(n):
                coeffs[VariableKey("u", t, ell)] = -scale
                key = VariableKey("v", t, ell)
                if key in kraft_coeffs:
                    coeffs[key] = -scale * Fraction(3, 4)
        slots.append(LinearConstraint(f"slot[{d}]", coeffs, "le", Fraction(0)))

    return IpInstance(
        family=BINARY, role=role, tree_index=0 if role == "T0" else 1,
        depth=depth, cost=cost, dist=dist, variables=variables,
        upper={v: 1 for v in variables},
        objective=objective, constraints=tuple([kraft] + assigns + slots),
    )


def build_ip_kary_two_tree(
    dist: SourceDistribution,
    arity: int,
    j: int,
    depth: int,
    cost: Fraction,
    role: str,
    family: Optional[CodeFamily] = None,
) -> IpInstance:
    """Two-tree K-ary problem: incomplete nodes have exactly j children and
    weigh (K-j)/K of a leaf; z[d] in 0..K-2 counts pruned leaf slots. The
    second tree's root keeps K-j children, so its Kraft weight is (K-j)/K
    and its depths start at 1. At K=3, j=1 this is the ternary problem."""
    _check_role(role)
    if family is None:
        family = kary_two_tree(arity, j)
    n = dist.size
    if n < 2:
        raise EmptyAlphabet("need at least 2 symbols")
    if depth < 1:
        raise DepthTooSmall("K-ary tree problems need D >= 1")
    cost = Fraction(cost)
    d_min = 0 if role == "T0" else 1
    v_weight = Fraction(arity - j, arity)

    u_keys = [VariableKey("u", t, d) for t in range(n) for d in range(d_min, depth + 1)]
    v_keys = [VariableKey("v", t, d) for t in range(n) for d in range(d_min, depth)]
    z_keys = [VariableKey("z", -1, d) for d in range(d_min, depth + 1)]
    variables = tuple(u_keys + v_keys + z_keys)
    upper = {v: 1 for v in u_keys + v_keys}
    upper.update({z: arity - 2 for z in z_keys})

    objective: dict[VariableKey, Fraction] = {}
    for key in u_keys:
        if key.d:
            objective[key] = dist.probs[key.t] * key.d
    for key in v_keys:
        objective[key] = dist.probs[key.t] * (key.d + cost)

    kraft_coeffs: dict[VariableKey, Fraction] = {}
    for key in u_keys:
        kraft_coeffs[key] = Fraction(1, arity ** key.d)
    for key in v_keys:
        kraft_coeffs[key] = v_weight * Fraction(1, arity ** key.d)
    for key in z_keys:
        kraft_coeffs[key] = Fraction(1, arity ** key.d)
    kraft = LinearConstraint(
        "kraft", kraft_coeffs, "eq",
        Fraction(1) if role == "T0" else v_weight,
    )

    assigns = [
        LinearConstraint(
            f"assign[{t}]",
            {k: Fraction(1) for k in u_keys + v_keys if k.t == t},
            "eq",
            Fraction(1),
        )
        for t in range(n)
    ]

    # Incomplete nodes of depth d need nodes at depth d+1 to act as children.
    slots = []
    for d in range(d_min, depth):
        coeffs: dict[VariableKey, Fraction] = {}
        for t in range(n):
            coeffs[VariableKey("v", t, d)] = Fraction(1)
        for ell in range(d + 1, depth + 1):
            scale = Fraction(1, arity ** (ell - d - 1))
            coeffs[VariableKey("z", -1, ell)] = -scale
            for t in range(n):
                coeffs[VariableKey("u", t, ell)] = -scale
                key = VariableKey("v", t, ell)
                if key in kraft_coeffs:
                    coeffs[key] = -scale * v_weight
        slots.append(LinearConstraint(f"continuity[{d}]", coeffs, "le", Fraction(0)))

    return IpInstance(
        family=family, role=role, tree_index=0 if role == "T0" else j,
        depth=depth, cost=cost, dist=dist, variables=variables,
        upper=upper, objective=objective,
        constraints=tuple([kraft] + assigns + slots),
    )


def build_ip_ternary(
    dist: SourceDistribution, depth: int, cost: Fraction, role: str
) -> IpInstance:
    """Ternary tree problem: the K=3, j=1 two-tree problem."""
    return build_ip_kary_two_tree(dist, 3, 1, depth, cost, role, family=TERNARY)


def build_instance(
    family: CodeFamily, dist: SourceDistribution, depth: int, cost: Fraction, role: str
) -> IpInstance:
    """Dispatch to the family's builder."""
    if family.kind == "binary":
        return build_ip_binary(dist, depth, cost, role)
    if family.kind == "ternary":
        return build_ip_ternary(dist, depth, cost, role)
    if family.kind == "kary":
        return build_ip_kary_two_tree(dist, family.arity, family.j, depth, cost, role)
    raise ValueError(f"no IP builder for family {family.kind!r}")


def default_depth(family: CodeFamily, dist: SourceDistribution) -> int:
    """2 ceil(log_K |X|) + 4: a few levels of headroom over the balanced tree."""
    n = dist.size
    e = 0
    while family.arity ** e < n:
        e += 1
    return 2 * e + 4


def lp_dump(instance: IpInstance) -> str:
    """LP-style text rendering (exact rational coefficients) for cross-checks."""

    def term(coef: Fraction, key: VariableKey) -> str:
        return f"{'+' if coef >= 0 else '-'} {abs(coef)} {key}"

    lines = [
        f"\\ family={instance.family.label()} role={instance.role} "
        f"D={instance.depth} C={instance.cost}",
        "Minimize",
        " obj: " + " ".join(
            term(instance.objective[k], k) for k in instance.variables
            if k in instance.objective
        ),
        "Subject To",
    ]
    for c in instance.constraints:
        rel = "=" if c.relation == "eq" else "<="
        body = " ".join(term(c.coeffs[k], k) for k in instance.variables if k in c.coeffs)
        lines.append(f" {c.label}: {body} {rel} {c.rhs}")
    lines.append("Bounds")
    for key in instance.variables:
        if instance.upper[key] != 1:
            lines.append(f" 0 <= {key} <= {instance.upper[key]}")
    lines.append("Binaries")
    lines.append(" " + " ".join(str(k) for k in instance.variables if instance.upper[k] == 1))
    lines.append("End")
    return "\n".join(lines)
