"""Finite pointed labelled transition systems.

Zig/zag bisimulation as a greatest fixpoint, depth-bounded approximants,
modal formula evaluation, ordinal state ranks, and the encoding of
finitely supported systems as numeric codes.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Union

from .foundations import EPSet, ORD_ZERO, Ordinal, ordinal_sup

StateId = str
Rel = frozenset  # of (StateId, StateId) pairs


class UnsupportedFormula(ValueError):
    """Raised when a formula atom has no semantics on the given structure."""


@dataclass(frozen=True)
class Top:
    pass


@dataclass(frozen=True)
class Neg:
    sub: "Formula"


@dataclass(frozen=True)
class And:
    subs: tuple["Formula", ...]


@dataclass(frozen=True)
class Or:
    subs: tuple["Formula", ...]


@dataclass(frozen=True)
class Dia:
    label: str
    sub: "Formula"


@dataclass(frozen=True)
class RankAtLeast:
    bound: Ordinal


@dataclass(frozen=True)
class CharSet:
    param: EPSet


Formula = Union[Top, Neg, And, Or, Dia, RankAtLeast, CharSet]

TOP = Top()


def modal_depth(phi: Formula) -> int:
    """Nesting depth of diamonds; the symbolic atoms have none to count."""
    if isinstance(phi, Top):
        return 0
    if isinstance(phi, Neg):
        return modal_depth(phi.sub)
    if isinstance(phi, (And, Or)):
        return max((modal_depth(sub) for sub in phi.subs), default=0)
    if isinstance(phi, Dia):
        return 1 + modal_depth(phi.sub)
    raise UnsupportedFormula(f"{type(phi).__name__} has no finite modal depth")


@dataclass(frozen=True)
class PointedLTS:
    """States, labelled edges, and a distinguished root.

    Declared orders of ``labels`` and ``states`` are part of the value and
    fix every iteration order downstream.
    """

    labels: tuple[str, ...]
    states: tuple[StateId, ...]
    root: StateId
    edges: frozenset  # of (source, label, target)

    def __post_init__(self) -> None:
        states = set(self.states)
        labels = set(self.labels)
        if len(states) != len(self.states):
            raise ValueError("duplicate state ids")
        if len(labels) != len(self.labels):
            raise ValueError("duplicate labels")
        if self.root not in states:
            raise ValueError(f"root {self.root!r} is not a declared state")
        for src, label, dst in self.edges:
            if src not in states or dst not in states:
                raise ValueError(f"edge ({src},{label},{dst}) leaves the state set")
            if label not in labels:
                raise ValueError(f"edge label {label!r} is not declared")

    @cached_property
    def _succ(self) -> dict[tuple[StateId, str], tuple[StateId, ...]]:
        pos = {s: i for i, s in enumerate(self.states)}
        table: dict[tuple[StateId, str], list[StateId]] = {}
        for src, label, dst in self.edges:
            table.setdefault((src, label), []).append(dst)
        return {
            key: tuple(sorted(set(targets), key=pos.__getitem__))
            for key, targets in table.items()
        }

    def successors(self, state: StateId, label: str) -> tuple[StateId, ...]:
        return self._succ.get((state, label), ())

    def all_successors(self, state: StateId) -> tuple[StateId, ...]:
        seen: list[StateId] = []
        for label in self.labels:
            for t in self.successors(state, label):
                if t not in seen:
                    seen.append(t)
        return tuple(seen)


@dataclass(frozen=True)
class OmegaLTSCode:
    """Numeric transition-system code: a root and finite edge sets per label."""

    root: int
    edges: Mapping[str, frozenset]  # label -> frozenset of (int, int)

    def __post_init__(self) -> None:
        if self.root < 0:
            raise ValueError("root must be a natural")
        for label, pairs in self.edges.items():
            for m, n in pairs:
                if m < 0 or n < 0:
                    raise ValueError(f"negative node in {label!r} edge ({m},{n})")

    def mentioned_nodes(self) -> set[int]:
        nodes = {self.root}
        for pairs in self.edges.values():
            for m, n in pairs:
                nodes.update((m, n))
        return nodes


def code_to_lts(code: OmegaLTSCode, reachable_bound: int) -> PointedLTS:
    """Materialize the part of the coded system reachable from its root.

    States are named by the decimal form of their node numbers. Raises if
    more than ``reachable_bound`` nodes are reachable.
    """
    labels = tuple(sorted(code.edges.keys()))
    succ: dict[int, set[int]] = {}
    for pairs in code.edges.values():
        for m, n in pairs:
            succ.setdefault(m, set()).add(n)
    seen = {code.root}
    frontier = [code.root]
    while frontier:
        node = frontier.pop()
        for nxt in succ.get(node, ()):
            if nxt not in seen:
                seen.add(nxt)
                if len(seen) > reachable_bound:
                    raise ValueError(
                        f"more than {reachable_bound} nodes reachable from the root"
                    )
                frontier.append(nxt)
    states = tuple(str(n) for n in sorted(seen))
    edges = frozenset(
        (str(m), label, str(n))
        for label in labels
        for m, n in code.edges[label]
        if m in seen and n in seen
    )
    return PointedLTS(labels, states, str(code.root), edges)


def lts_to_code(lts: PointedLTS, numbering: Mapping[StateId, int]) -> OmegaLTSCode:
    """Encode an LTS through an injective numbering of its states."""
    values = list(numbering.values())
    if len(set(values)) != len(values):
        raise ValueError("numbering must be injective")
    for s in lts.states:
        if s not in numbering:
            raise ValueError(f"numbering misses state {s!r}")
    edges = {
        label: frozenset(
            (numbering[src], numbering[dst])
            for src, lab, dst in lts.edges
            if lab == label
        )
        for label in lts.labels
    }
    return OmegaLTSCode(numbering[lts.root], edges)


def _label_universe(left: PointedLTS, right: PointedLTS) -> tuple[str, ...]:
    extra = tuple(l for l in right.labels if l not in left.labels)
    return left.labels + extra


def _pair_matches(
    left: PointedLTS,
    right: PointedLTS,
    s: StateId,
    t: StateId,
    rel: set,
    labels: tuple[str, ...],
) -> bool:
    for a in labels:
        for s1 in left.successors(s, a):
            if not any((s1, t1) in rel for t1 in right.successors(t, a)):
                return False
        for t1 in right.successors(t, a):
            if not any((s1, t1) in rel for s1 in left.successors(s, a)):
                return False
    return True


def is_bisimulation(left: PointedLTS, right: PointedLTS, rel: Iterable) -> bool:
    """Definitional zig/zag check of a candidate relation."""
    rel = set(rel)
    labels = _label_universe(left, right)
    return all(_pair_matches(left, right, s, t, rel, labels) for s, t in rel)


def greatest_bisim(left: PointedLTS, right: PointedLTS) -> Rel:
    """Largest zig/zag relation, as the decreasing fixpoint from the total one."""
    labels = _label_universe(left, right)
    rel = {(s, t) for s in left.states for t in right.states}
    changed = True
    while changed:
        changed = False
        for s in left.states:
            for t in right.states:
                if (s, t) in rel and not _pair_matches(left, right, s, t, rel, labels):
                    rel.remove((s, t))
                    changed = True
    return frozenset(rel)


def bisimilar(left: PointedLTS, right: PointedLTS) -> bool:
    return (left.root, right.root) in greatest_bisim(left, right)


def bisim_partition(lts: PointedLTS) -> tuple[tuple[StateId, ...], ...]:
    """Blocks of the greatest self-bisimulation, each sorted by state order."""
    rel = greatest_bisim(lts, lts)
    pos = {s: i for i, s in enumerate(lts.states)}
    blocks: list[list[StateId]] = []
    for s in lts.states:
        for block in blocks:
            if (s, block[0]) in rel:
                block.append(s)
                break
        else:
            blocks.append([s])
    return tuple(tuple(block) for block in blocks)


def bounded_bisim(left: PointedLTS, right: PointedLTS, depth: int) -> Rel:
    """Depth-d approximant: refine the total relation d times."""
    labels = _label_universe(left, right)
    rel = {(s, t) for s in left.states for t in right.states}
    for _ in range(depth):
        rel = {
            (s, t)
            for s, t in rel
            if _pair_matches(left, right, s, t, rel, labels)
        }
    return frozenset(rel)


def eval_formula(lts: PointedLTS, state: StateId, phi: Formula) -> bool:
    """Kripke semantics; rank atoms defer to state_rank."""
    if state not in lts.states:
        raise ValueError(f"unknown state {state!r}")
    if isinstance(phi, Top):
        return True
    if isinstance(phi, Neg):
        return not eval_formula(lts, state, phi.sub)
    if isinstance(phi, And):
        return all(eval_formula(lts, state, sub) for sub in phi.subs)
    if isinstance(phi, Or):
        return any(eval_formula(lts, state, sub) for sub in phi.subs)
    if isinstance(phi, Dia):
        return any(
            eval_formula(lts, nxt, phi.sub)
            for nxt in lts.successors(state, phi.label)
        )
    if isinstance(phi, RankAtLeast):
        rank = state_rank(lts, state)
        return rank is None or rank >= phi.bound
    raise UnsupportedFormula(
        "characteristic-set formulas only evaluate on symbolic trees"
    )


def sat_states(lts: PointedLTS, phi: Formula) -> frozenset:
    return frozenset(s for s in lts.states if eval_formula(lts, s, phi))


def state_rank(lts: PointedLTS, state: StateId) -> Ordinal | None:
    """Ordinal depth of the outgoing behavior; None when a cycle is reachable."""
    order = _topo_from(lts, state)
    if order is None:
        return None
    ranks: dict[StateId, Ordinal] = {}
    for u in reversed(order):
        ranks[u] = ordinal_sup(ranks[v] + 1 for v in lts.all_successors(u))
    return ranks[state]


def _topo_from(lts: PointedLTS, state: StateId) -> list[StateId] | None:
    """Topological order of the part reachable from state; None on a cycle."""
    WHITE, GRAY, BLACK = 0, 1, 2
    color = {s: WHITE for s in lts.states}
    order: list[StateId] = []
    stack: list[tuple[StateId, int]] = [(state, 0)]
    color[state] = GRAY
    while stack:
        node, idx = stack.pop()
        succs = lts.all_successors(node)
        advanced = False
        while idx < len(succs):
            nxt = succs[idx]
            idx += 1
            if color[nxt] == GRAY:
                return None
            if color[nxt] == WHITE:
                stack.append((node, idx))
                stack.append((nxt, 0))
                color[nxt] = GRAY
                advanced = True
                break
        if not advanced and idx >= len(succs):
            color[node] = BLACK
            order.append(node)
    order.reverse()
    return order


def well_founded_states(lts: PointedLTS) -> frozenset:
    return frozenset(s for s in lts.states if state_rank(lts, s) is not None)


def rank_formula(alpha: Ordinal, labels: tuple[str, ...]) -> Formula:
    """The alpha-th formula of the rank hierarchy.

    Finite stages unroll to an explicit disjunction of diamonds; the limit
    and beyond stay symbolic.
    """
    if alpha.is_zero:
        return TOP
    if not alpha.is_finite:
        return RankAtLeast(alpha)
    phi: Formula = TOP
    for _ in range(alpha.as_int()):
        phi = Or(tuple(Dia(a, phi) for a in labels))
    return phi


def diamond_formula(alpha: Ordinal, label: str = "suc") -> Formula:
    """Single-diamond variant of the rank hierarchy, for single-label trees."""
    if alpha.is_zero:
        return TOP
    if not alpha.is_finite:
        return RankAtLeast(alpha)
    phi: Formula = TOP
    for _ in range(alpha.as_int()):
        phi = Dia(label, phi)
    return phi


def total_rel(left_states: Iterable[StateId], right_states: Iterable[StateId]) -> Rel:
    return frozenset((s, t) for s in left_states for t in right_states)


def identity_rel(states: Iterable[StateId]) -> Rel:
    return frozenset((s, s) for s in states)


def symmetric_closure(rel: Iterable) -> Rel:
    rel = set(rel)
    return frozenset(rel | {(t, s) for s, t in rel})
