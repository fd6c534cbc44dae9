"""Transition systems, bisimulation fixpoints, ranks, and codes."""

import random

import pytest

from bisimkit.foundations import ORD_OMEGA, ORD_ZERO, Ordinal
from bisimkit.lts import (
    And,
    CharSet,
    Dia,
    Neg,
    OmegaLTSCode,
    Or,
    PointedLTS,
    RankAtLeast,
    TOP,
    Top,
    UnsupportedFormula,
    bisim_partition,
    bisimilar,
    bounded_bisim,
    code_to_lts,
    diamond_formula,
    eval_formula,
    greatest_bisim,
    identity_rel,
    is_bisimulation,
    lts_to_code,
    modal_depth,
    rank_formula,
    sat_states,
    state_rank,
    symmetric_closure,
    total_rel,
    well_founded_states,
)
from bisimkit.foundations import EPSet


def chain_lts(length: int, label: str = "a", prefix: str = "s") -> PointedLTS:
    states = tuple(f"{prefix}{i}" for i in range(length + 1))
    edges = frozenset(
        (f"{prefix}{i}", label, f"{prefix}{i + 1}") for i in range(length)
    )
    return PointedLTS((label,), states, f"{prefix}0", edges)


def random_lts(rng: random.Random, n_states: int, labels: tuple[str, ...], p: float) -> PointedLTS:
    states = tuple(f"q{i}" for i in range(n_states))
    edges = frozenset(
        (s, a, t)
        for s in states
        for a in labels
        for t in states
        if rng.random() < p
    )
    return PointedLTS(labels, states, states[0], edges)


def random_wf_lts(rng: random.Random, n_states: int, labels: tuple[str, ...], p: float) -> PointedLTS:
    """Edges only go up in state index, so every path is finite."""
    states = tuple(f"q{i}" for i in range(n_states))
    edges = frozenset(
        (states[i], a, states[j])
        for i in range(n_states)
        for j in range(i + 1, n_states)
        for a in labels
        if rng.random() < p
    )
    return PointedLTS(labels, states, states[0], edges)


def zigzag_ok(left: PointedLTS, right: PointedLTS, rel: set) -> bool:
    """Definitional check written out independently of the library's."""
    labels = tuple(dict.fromkeys(left.labels + right.labels))
    for s, t in rel:
        for a in labels:
            for s1 in left.successors(s, a):
                if not any((s1, t1) in rel for t1 in right.successors(t, a)):
                    return False
            for t1 in right.successors(t, a):
                if not any((s1, t1) in rel for s1 in left.successors(s, a)):
                    return False
    return True


def oracle_greatest(left: PointedLTS, right: PointedLTS) -> frozenset:
    """Union of every relation passing the definitional check, by brute force."""
    pairs = [(s, t) for s in left.states for t in right.states]
    union: set = set()
    for mask in range(2 ** len(pairs)):
        rel = {pairs[i] for i in range(len(pairs)) if mask >> i & 1}
        if zigzag_ok(left, right, rel):
            union |= rel
    return frozenset(union)


def oracle_rank(lts: PointedLTS, state: str) -> int | None:
    """Path-exploring rank; None when some path can loop forever."""

    def go(s: str, on_path: frozenset) -> int | None:
        if s in on_path:
            return None
        best = -1
        for t in lts.all_successors(s):
            r = go(t, on_path | {s})
            if r is None:
                return None
            best = max(best, r)
        return best + 1

    return go(state, frozenset())


class TestGreatestBisim:
    def test_loop_vs_two_cycle(self):
        one = PointedLTS(("a",), ("s",), "s", frozenset({("s", "a", "s")}))
        two = PointedLTS(
            ("a",), ("t", "u"), "t", frozenset({("t", "a", "u"), ("u", "a", "t")})
        )
        rel = greatest_bisim(one, two)
        assert rel == frozenset({("s", "t"), ("s", "u")})
        assert bisimilar(one, two)

    def test_branching_counterexample(self):
        early = PointedLTS(
            ("a", "b", "c"),
            ("r", "u1", "u2", "v", "w"),
            "r",
            frozenset(
                {
                    ("r", "a", "u1"),
                    ("r", "a", "u2"),
                    ("u1", "b", "v"),
                    ("u2", "c", "w"),
                }
            ),
        )
        late = PointedLTS(
            ("a", "b", "c"),
            ("r", "u", "v", "w"),
            "r",
            frozenset({("r", "a", "u"), ("u", "b", "v"), ("u", "c", "w")}),
        )
        assert not bisimilar(early, late)

    def test_chain_lengths_differ(self):
        assert not bisimilar(chain_lts(2), chain_lts(3, prefix="t"))
        assert bisimilar(chain_lts(3), chain_lts(3, prefix="t"))

    def test_mismatched_label_sets(self):
        lab = PointedLTS(("a",), ("s", "t"), "s", frozenset({("s", "a", "t")}))
        silent = PointedLTS(("b",), ("u",), "u", frozenset())
        assert not bisimilar(lab, silent)

    def test_matches_exhaustive_union_on_random_systems(self):
        rng = random.Random(41)
        for _ in range(40):
            left = random_lts(rng, rng.randint(1, 3), ("a", "b")[: rng.randint(1, 2)], 0.4)
            right = random_lts(rng, rng.randint(1, 3), left.labels, 0.4)
            expected = oracle_greatest(left, right)
            got = greatest_bisim(left, right)
            assert got == expected
            assert is_bisimulation(left, right, got)

    def test_contains_identity_on_self(self):
        rng = random.Random(42)
        for _ in range(25):
            lts = random_lts(rng, rng.randint(1, 4), ("a", "b"), 0.35)
            rel = greatest_bisim(lts, lts)
            assert identity_rel(lts.states) <= rel
            assert symmetric_closure(rel) == rel


class TestBoundedBisim:
    def test_depth_zero_is_total(self):
        left, right = chain_lts(1), chain_lts(2, prefix="t")
        assert bounded_bisim(left, right, 0) == total_rel(left.states, right.states)

    def test_chains_separate_at_exact_depth(self):
        left, right = chain_lts(2), chain_lts(3, prefix="t")
        assert ("s0", "t0") in bounded_bisim(left, right, 2)
        assert ("s0", "t0") not in bounded_bisim(left, right, 3)

    def test_decreasing_and_stabilizes_to_greatest(self):
        rng = random.Random(43)
        for _ in range(25):
            left = random_lts(rng, rng.randint(1, 3), ("a",), 0.5)
            right = random_lts(rng, rng.randint(1, 3), ("a",), 0.5)
            prev = bounded_bisim(left, right, 0)
            for d in range(1, 10):
                cur = bounded_bisim(left, right, d)
                assert cur <= prev
                prev = cur
            assert prev == greatest_bisim(left, right)


class TestPartition:
    def test_terminals_share_a_block(self):
        lts = PointedLTS(
            ("a",), ("x", "y", "z"), "x", frozenset({("z", "a", "x")})
        )
        assert bisim_partition(lts) == (("x", "y"), ("z",))

    def test_blocks_partition_states(self):
        rng = random.Random(44)
        for _ in range(20):
            lts = random_lts(rng, rng.randint(1, 5), ("a", "b"), 0.3)
            blocks = bisim_partition(lts)
            flat = [s for block in blocks for s in block]
            assert sorted(flat) == sorted(lts.states)
            assert len(set(flat)) == len(flat)


class TestRanks:
    def test_terminal_state_has_rank_zero(self):
        lts = PointedLTS(("a",), ("s",), "s", frozenset())
        assert state_rank(lts, "s") == ORD_ZERO

    def test_chain_rank_is_length(self):
        lts = chain_lts(4)
        assert state_rank(lts, "s0") == Ordinal.from_int(4)
        assert state_rank(lts, "s3") == Ordinal.from_int(1)

    def test_self_loop_has_no_rank(self):
        lts = PointedLTS(("a",), ("s",), "s", frozenset({("s", "a", "s")}))
        assert state_rank(lts, "s") is None

    def test_cycle_reachable_poisons_rank(self):
        lts = PointedLTS(
            ("a",),
            ("s", "t", "u"),
            "s",
            frozenset({("s", "a", "t"), ("t", "a", "u"), ("u", "a", "t")}),
        )
        assert state_rank(lts, "s") is None
        assert well_founded_states(lts) == frozenset()

    def test_rank_ignores_unreachable_cycle(self):
        lts = PointedLTS(
            ("a",),
            ("s", "t", "loop"),
            "s",
            frozenset({("s", "a", "t"), ("loop", "a", "loop")}),
        )
        assert state_rank(lts, "s") == Ordinal.from_int(1)
        assert well_founded_states(lts) == frozenset({"s", "t"})

    def test_matches_path_oracle_on_random_systems(self):
        rng = random.Random(45)
        for _ in range(60):
            lts = random_lts(rng, rng.randint(1, 6), ("a", "b"), 0.25)
            for s in lts.states:
                expected = oracle_rank(lts, s)
                got = state_rank(lts, s)
                if expected is None:
                    assert got is None
                else:
                    assert got == Ordinal.from_int(expected)


class TestFormulas:
    def test_stage_zero_is_top(self):
        assert rank_formula(ORD_ZERO, ("a",)) == TOP
        assert diamond_formula(ORD_ZERO) == TOP

    def test_finite_stage_shape(self):
        phi = rank_formula(Ordinal.from_int(1), ("a", "b"))
        assert phi == Or((Dia("a", TOP), Dia("b", TOP)))
        psi = diamond_formula(Ordinal.from_int(2), "a")
        assert psi == Dia("a", Dia("a", TOP))

    def test_limit_stage_is_symbolic(self):
        assert rank_formula(ORD_OMEGA, ("a",)) == RankAtLeast(ORD_OMEGA)

    def test_rank_is_least_failing_stage(self):
        rng = random.Random(46)
        for _ in range(30):
            lts = random_wf_lts(rng, rng.randint(1, 6), ("a", "b"), 0.35)
            for s in lts.states:
                rank = state_rank(lts, s)
                assert rank is not None
                for alpha in range(6):
                    ord_alpha = Ordinal.from_int(alpha)
                    holds = eval_formula(lts, s, rank_formula(ord_alpha, lts.labels))
                    assert holds == (rank >= ord_alpha)

    def test_ill_founded_state_satisfies_every_stage(self):
        lts = PointedLTS(("a",), ("s",), "s", frozenset({("s", "a", "s")}))
        for alpha in range(5):
            assert eval_formula(lts, "s", rank_formula(Ordinal.from_int(alpha), ("a",)))
        assert eval_formula(lts, "s", RankAtLeast(ORD_OMEGA))

    def test_diamond_formula_on_chains(self):
        lts = chain_lts(3)
        for j in range(6):
            holds = eval_formula(lts, "s0", diamond_formula(Ordinal.from_int(j), "a"))
            assert holds == (j <= 3)

    def test_boolean_connectives(self):
        lts = PointedLTS(
            ("a", "b"),
            ("s", "t"),
            "s",
            frozenset({("s", "a", "t")}),
        )
        assert eval_formula(lts, "s", And((Dia("a", TOP), Neg(Dia("b", TOP)))))
        assert not eval_formula(lts, "s", Or((Dia("b", TOP),)))
        assert sat_states(lts, Dia("a", TOP)) == frozenset({"s"})

    def test_char_set_has_no_lts_semantics(self):
        lts = chain_lts(1)
        with pytest.raises(UnsupportedFormula):
            eval_formula(lts, "s0", CharSet(EPSet.empty()))

    def test_modal_depth(self):
        assert modal_depth(TOP) == 0
        assert modal_depth(Dia("a", And((TOP, Dia("a", TOP))))) == 2
        with pytest.raises(UnsupportedFormula):
            modal_depth(RankAtLeast(ORD_OMEGA))


class TestCodes:
    def test_round_trip_preserves_structure(self):
        rng = random.Random(47)
        for _ in range(25):
            lts = random_lts(rng, rng.randint(1, 5), ("a", "b"), 0.3)
            numbering = {s: i for i, s in enumerate(lts.states)}
            code = lts_to_code(lts, numbering)
            back = code_to_lts(code, reachable_bound=len(lts.states))
            expected_states = _reachable(lts)
            assert set(back.states) == {str(numbering[s]) for s in expected_states}
            assert bisimilar(lts, back)

    def test_code_example(self):
        code = OmegaLTSCode(0, {"a": frozenset({(0, 1)})})
        lts = code_to_lts(code, reachable_bound=2)
        assert lts.states == ("0", "1")
        assert lts.root == "0"
        assert lts.edges == frozenset({("0", "a", "1")})

    def test_reachable_bound_enforced(self):
        code = OmegaLTSCode(0, {"a": frozenset({(0, 1), (1, 2)})})
        with pytest.raises(ValueError):
            code_to_lts(code, reachable_bound=2)

    def test_unreachable_edges_dropped(self):
        code = OmegaLTSCode(0, {"a": frozenset({(5, 6)})})
        lts = code_to_lts(code, reachable_bound=1)
        assert lts.states == ("0",)
        assert lts.edges == frozenset()

    def test_numbering_must_be_injective(self):
        lts = chain_lts(1)
        with pytest.raises(ValueError):
            lts_to_code(lts, {"s0": 0, "s1": 0})

    def test_negative_nodes_rejected(self):
        with pytest.raises(ValueError):
            OmegaLTSCode(0, {"a": frozenset({(0, -1)})})


class TestValidation:
    def test_root_must_be_declared(self):
        with pytest.raises(ValueError):
            PointedLTS(("a",), ("s",), "t", frozenset())

    def test_edge_labels_must_be_declared(self):
        with pytest.raises(ValueError):
            PointedLTS(("a",), ("s",), "s", frozenset({("s", "b", "s")}))

    def test_edge_endpoints_must_be_states(self):
        with pytest.raises(ValueError):
            PointedLTS(("a",), ("s",), "s", frozenset({("s", "a", "t")}))


def _reachable(lts: PointedLTS) -> set:
    seen = {lts.root}
    frontier = [lts.root]
    while frontier:
        s = frontier.pop()
        for t in lts.all_successors(s):
            if t not in seen:
                seen.add(t)
                frontier.append(t)
    return seen
