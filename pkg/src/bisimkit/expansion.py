"""Expansion of transition systems into trees of counted runs.

Every successor is duplicated countably often, so each distinct child
expansion appears with multiplicity omega. Well-founded states expand to
a multiplicity tree outright; arbitrary states expand to any finite
depth. Coded systems also unfold into explicit path trees whose letters
record (target node, label, duplicate index).
"""

from __future__ import annotations

from .foundations import OMEGA_COUNT
from .lts import OmegaLTSCode, PointedLTS, StateId, code_to_lts, state_rank
from .trees import ExplicitTree, MultiTree


def omega_expand(lts: PointedLTS, state: StateId) -> MultiTree:
    """Full expansion of a state that cannot reach a cycle."""
    if state not in lts.states:
        raise ValueError(f"unknown state {state!r}")
    if state_rank(lts, state) is None:
        raise ValueError(
            f"state {state!r} can reach a cycle; its full expansion is infinite"
        )
    memo: dict[StateId, MultiTree] = {}

    def go(s: StateId) -> MultiTree:
        if s not in memo:
            entries = []
            for label in lts.labels:
                distinct: list[MultiTree] = []
                for t in lts.successors(s, label):
                    sub = go(t)
                    if sub not in distinct:
                        distinct.append(sub)
                entries.extend((label, sub, OMEGA_COUNT) for sub in distinct)
            memo[s] = MultiTree(tuple(entries))
        return memo[s]

    return go(state)


def omega_expand_truncated(lts: PointedLTS, state: StateId, depth: int) -> MultiTree:
    """Expansion cut at a depth; defined for every state."""
    if state not in lts.states:
        raise ValueError(f"unknown state {state!r}")
    if depth < 0:
        raise ValueError("depth must be a natural")
    memo: dict[tuple[StateId, int], MultiTree] = {}

    def go(s: StateId, d: int) -> MultiTree:
        if d == 0:
            return MultiTree()
        key = (s, d)
        if key not in memo:
            entries = []
            for label in lts.labels:
                distinct: list[MultiTree] = []
                for t in lts.successors(s, label):
                    sub = go(t, d - 1)
                    if sub not in distinct:
                        distinct.append(sub)
                entries.extend((label, sub, OMEGA_COUNT) for sub in distinct)
            memo[key] = MultiTree(tuple(entries))
        return memo[key]

    return go(state, depth)


def omega_code_expand(code: OmegaLTSCode) -> MultiTree:
    """Expand a coded system at its root."""
    bound = len(code.mentioned_nodes())
    lts = code_to_lts(code, reachable_bound=bound)
    return omega_expand(lts, lts.root)


def omega_code_tree(code: OmegaLTSCode, depth: int, width: int) -> ExplicitTree:
    """Explicit path tree of a coded system.

    Nodes are sequences of (target node, label, duplicate index) triples;
    only paths of length <= depth with duplicate indices < width appear.
    """
    if depth < 0 or width < 0:
        raise ValueError("depth and width must be naturals")
    succ: dict[int, list[tuple[str, int]]] = {}
    for label in sorted(code.edges):
        for m, n in sorted(code.edges[label]):
            succ.setdefault(m, []).append((label, n))
    nodes: set[tuple] = {()}
    frontier: list[tuple[tuple, int]] = [((), code.root)]
    while frontier:
        path, cur = frontier.pop()
        if len(path) >= depth:
            continue
        for label, target in succ.get(cur, ()):
            for i in range(width):
                child = path + ((target, label, i),)
                nodes.add(child)
                frontier.append((child, target))
    return ExplicitTree(frozenset(nodes))
