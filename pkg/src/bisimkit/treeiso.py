"""Isomorphism of multiplicity trees, two independent ways.

The canonical form serializes a tree to a stable string: children are
grouped by label and canonical subtree, multiplicities are summed with
saturation, and entries are sorted, so two trees get the same string
exactly when they are isomorphic. The recursive decision procedure
instead partitions child slots into isomorphism classes on the fly and
compares multiplicity maps; the two routes check each other.

Rank-indexed isomorphism and the forth/back matching conditions refine
this by the ordinal rank of the trees involved.
"""

from __future__ import annotations

import json
from functools import cache

from .foundations import Count, Ordinal
from .trees import MultiTree


@cache
def _canon_data(tree: MultiTree) -> dict:
    groups: dict[tuple[str, str], list] = {}
    for label, sub, count in tree.children:
        child = _canon_data(sub)
        key = (label, json.dumps(child, sort_keys=True, separators=(",", ":")))
        if key in groups:
            groups[key][1] = groups[key][1] + count
        else:
            groups[key] = [child, count]
    data: dict[str, list] = {}
    for label, child_str in sorted(groups):
        child, total = groups[(label, child_str)]
        data.setdefault(label, []).append([child, total.to_json()])
    return data


def canon(tree: MultiTree) -> str:
    """Stable canonical string; equal exactly for isomorphic trees."""
    return json.dumps(_canon_data(tree), sort_keys=True, separators=(",", ":"))


def iso(left: MultiTree, right: MultiTree) -> bool:
    return canon(left) == canon(right)


def _entries_by_label(tree: MultiTree) -> dict[str, list]:
    table: dict[str, list] = {}
    for label, sub, count in tree.children:
        table.setdefault(label, []).append((sub, count))
    return table


@cache
def _iso_rec(left: MultiTree, right: MultiTree) -> bool:
    """Recursive isomorphism via per-label multiplicity maps of child classes."""
    left_by = _entries_by_label(left)
    right_by = _entries_by_label(right)
    if set(left_by) != set(right_by):
        return False
    for label in left_by:
        reps: list[MultiTree] = []
        left_mult: list[Count] = []
        right_mult: list[Count] = []

        def slot(sub: MultiTree) -> int:
            for i, rep in enumerate(reps):
                if _iso_rec(sub, rep):
                    return i
            reps.append(sub)
            left_mult.append(Count(0))
            right_mult.append(Count(0))
            return len(reps) - 1

        for sub, count in left_by[label]:
            i = slot(sub)
            left_mult[i] = left_mult[i] + count
        for sub, count in right_by[label]:
            i = slot(sub)
            right_mult[i] = right_mult[i] + count
        if left_mult != right_mult:
            return False
    return True


def iso_at_rank(left: MultiTree, right: MultiTree, alpha: Ordinal) -> bool:
    """Isomorphism within the class of trees of rank exactly alpha."""
    return (
        left.tree_rank() == alpha
        and right.tree_rank() == alpha
        and _iso_rec(left, right)
    )


def _type_counts(tree: MultiTree) -> list:
    """Child types as (label, representative, total multiplicity)."""
    types: list = []  # (label, rep, Count)
    for label, sub, count in tree.children:
        for i, (lab, rep, total) in enumerate(types):
            if lab == label and _iso_rec(sub, rep):
                types[i] = (lab, rep, total + count)
                break
        else:
            types.append((label, sub, count))
    return types


def matching_clause(
    source: MultiTree, target: MultiTree, alpha: Ordinal, k: int
) -> bool:
    """Can every injective k-tuple of source children be matched in target?

    A match pairs each chosen child with a distinct target child of the
    same label, isomorphic at some rank below alpha. A type of
    multiplicity m never needs more than min(m, k) partners, so the
    quantifier over tuples collapses to a per-type count comparison.
    """
    if k < 0:
        raise ValueError("tuple length must be a natural")
    total = source.total_children()
    if not total.is_omega and total.finite < k:
        return True
    if k == 0:
        return True
    target_types = _type_counts(target)
    for label, rep, count in _type_counts(source):
        if rep.tree_rank() >= alpha:
            return False
        available = Count(0)
        for lab, other, other_count in target_types:
            if lab == label and _iso_rec(rep, other):
                available = other_count
                break
        if not available.at_least(count.capped(k)):
            return False
    return True


def forth_condition(
    source: MultiTree, target: MultiTree, alpha: Ordinal, k: int
) -> bool:
    return source.tree_rank() == alpha and matching_clause(source, target, alpha, k)


def forth_back(left: MultiTree, right: MultiTree, alpha: Ordinal, k: int) -> bool:
    """Both one-sided conditions at rank alpha and tuple length k."""
    return forth_condition(left, right, alpha, k) and forth_condition(
        right, left, alpha, k
    )
