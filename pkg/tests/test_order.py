import itertools

import pytest
from hypothesis import given, strategies as st

from forcelab.dsl import ParseError
from forcelab.order import (
    CH2,
    FIXTURES,
    FORK3,
    NSEP4,
    NWM5,
    Filter,
    FilterError,
    PosetError,
    classify,
    compatible,
    cone,
    enumerate_filters,
    generated_filter,
    generic_filters,
    is_separative,
    is_well_met,
    make_poset,
    parse_poset,
    poset_dsl,
    separative_quotient,
)

from oracles import (
    is_filter_members,
    naive_dense,
    naive_filters,
    naive_predense,
    naive_separative_classes,
    subsets,
)


def members(f):
    return f.sorted_members


class TestParse:
    def test_fork3(self):
        P = parse_poset("poset FORK3 { elems 1 a b; order a<1 b<1; }")
        assert P.elements == ("1", "a", "b")
        assert P.top == "1"
        assert not compatible(P, "a", "b")
        assert P == FORK3

    def test_two_chain(self):
        P = parse_poset("poset CH2 { elems 1 a; order a<1; }")
        assert P.elements == ("1", "a")
        assert P.leq("a", "1")
        assert P == CH2

    def test_cycle_rejected(self):
        with pytest.raises(PosetError, match="cycle"):
            parse_poset("poset BAD { elems a b; order a<b b<a; }")

    def test_no_unique_maximum(self):
        with pytest.raises(PosetError, match="maximum"):
            parse_poset("poset BAD { elems a b; }")

    def test_syntax_error_has_position(self):
        with pytest.raises(ParseError) as exc:
            parse_poset("poset X { elems 1 a; order a < ; }")
        assert exc.value.line == 1

    def test_declared_top(self):
        P = parse_poset("poset X { elems 1 a; order a<1; top 1; }")
        assert P.top == "1"

    def test_single_element(self):
        P = parse_poset("poset ONE { elems t; }")
        assert P.elements == ("t",)
        assert P.top == "t"

    def test_duplicate_element(self):
        with pytest.raises(ParseError, match="duplicate"):
            parse_poset("poset X { elems 1 1; }")

    def test_unknown_in_order(self):
        with pytest.raises(ParseError, match="unknown"):
            parse_poset("poset X { elems 1 a; order z<1; }")

    def test_dsl_roundtrip(self):
        for P in FIXTURES.values():
            assert parse_poset(poset_dsl(P)) == P


class TestCompatible:
    def test_fork3_pairs(self):
        assert compatible(FORK3, "a", "b") is False
        assert compatible(FORK3, "a", "1") is True

    def test_nsep4_witness(self):
        assert compatible(NSEP4, "a", "b") is True

    def test_unknown_element(self):
        with pytest.raises(PosetError, match="unknown"):
            compatible(FORK3, "a", "z")

    def test_matches_oracle_everywhere(self):
        for P in FIXTURES.values():
            for p, q in itertools.product(P.elements, repeat=2):
                assert compatible(P, p, q) == any(
                    P.leq(r, p) and P.leq(r, q) for r in P.elements
                )


class TestClassify:
    def test_fork3_antichain(self):
        c = classify(FORK3, {"a", "b"})
        assert c.dense and c.predense and c.antichain and c.maximal_antichain
        assert c.flavor == "dense"

    def test_fork3_singleton(self):
        c = classify(FORK3, {"a"})
        assert not c.dense and not c.predense

    def test_nsep4_singleton_predense(self):
        # b is compatible with a through c, so {a} is predense but not dense
        c = classify(NSEP4, {"a"})
        assert c.predense and not c.dense
        assert c.flavor == "predense"

    def test_dense_implies_predense_exhaustive(self):
        for P in FIXTURES.values():
            for S in subsets(P.elements):
                if not S:
                    continue
                c = classify(P, S)
                assert c.dense == naive_dense(P, S)
                assert c.predense == naive_predense(P, S)
                if c.dense:
                    assert c.predense


class TestFilters:
    def test_ch2_listing(self):
        got = [members(f) for f in enumerate_filters(CH2, include_empty=True)]
        assert got == [(), ("1",), ("1", "a")]

    def test_fork3_listing(self):
        got = [members(f) for f in enumerate_filters(FORK3, include_empty=True)]
        assert got == [(), ("1",), ("1", "a"), ("1", "b")]

    def test_nsep4_has_five(self):
        got = [members(f) for f in enumerate_filters(NSEP4, include_empty=True)]
        assert got == [(), ("1",), ("1", "a"), ("1", "b"), ("1", "a", "b", "c")]

    def test_default_excludes_empty(self):
        assert all(f.members for f in enumerate_filters(NSEP4))

    def test_matches_subset_scan_oracle(self):
        for P in FIXTURES.values():
            expected = naive_filters(P, include_empty=True)
            got = [f.members for f in enumerate_filters(P, include_empty=True)]
            assert got == expected

    def test_invariants_hold(self):
        for P in FIXTURES.values():
            for f in enumerate_filters(P):
                assert is_filter_members(P, f.members)
                assert P.top in f.members

    def test_invalid_filter_rejected(self):
        with pytest.raises(FilterError):
            Filter(FORK3, frozenset({"a"}))  # not upward closed
        with pytest.raises(FilterError):
            Filter(FORK3, frozenset({"1", "a", "b"}))  # not directed


class TestGeneratedFilter:
    def test_fork3_single(self):
        assert members(generated_filter(FORK3, {"a"})) == ("1", "a")

    def test_fork3_incompatible(self):
        with pytest.raises(FilterError, match="incompatible"):
            generated_filter(FORK3, {"a", "b"})

    def test_nsep4_meet(self):
        assert members(generated_filter(NSEP4, {"a", "b"})) == ("1", "a", "b", "c")

    def test_regenerates_every_filter(self):
        for P in FIXTURES.values():
            for f in enumerate_filters(P):
                assert generated_filter(P, f.members) == f

    def test_non_closable(self):
        # a and b are compatible in NWM5 but have no greatest lower bound
        with pytest.raises(FilterError, match="closable"):
            generated_filter(NWM5, {"a", "b"})


class TestSeparativeQuotient:
    def test_fork3_identity(self):
        Q, ids = separative_quotient(FORK3)
        assert Q == FORK3.restrict(FORK3.elements, "1")
        assert ids == {"1": "1", "a": "a", "b": "b"}

    def test_nsep4_collapses(self):
        Q, ids = separative_quotient(NSEP4)
        assert len(Q.elements) == 1
        assert set(ids.values()) == {"1|a|b|c"}

    def test_ch2_collapses(self):
        Q, ids = separative_quotient(CH2)
        assert len(Q.elements) == 1

    def test_classes_match_oracle(self):
        for P in FIXTURES.values():
            _, ids = separative_quotient(P)
            got = sorted(
                {frozenset(k for k, v in ids.items() if v == c) for c in ids.values()},
                key=lambda c: tuple(sorted(c)),
            )
            assert got == naive_separative_classes(P)

    def test_idempotent(self):
        for P in FIXTURES.values():
            Q1, _ = separative_quotient(P)
            Q2, _ = separative_quotient(Q1)
            assert Q2 == Q1

    def test_mapping_preserves_order_and_compatibility(self):
        for P in FIXTURES.values():
            Q, ids = separative_quotient(P)
            for p, q in itertools.product(P.elements, repeat=2):
                if P.leq(p, q):
                    assert Q.leq(ids[p], ids[q])
                if compatible(P, p, q):
                    assert compatible(Q, ids[p], ids[q])


class TestCone:
    def test_fork3_tip(self):
        C = cone(FORK3, "a")
        assert C.elements == ("a",)
        assert C.top == "a"

    def test_nsep4_chain(self):
        C = cone(NSEP4, "a")
        assert C.elements == ("a", "c")
        assert C.leq("c", "a")

    def test_top_cone_is_identity(self):
        for P in FIXTURES.values():
            C = cone(P, P.top)
            assert C.elements == P.elements and C.pairs == P.pairs

    def test_unknown(self):
        with pytest.raises(PosetError):
            cone(FORK3, "zz")


class TestWellMet:
    def test_nsep4(self):
        assert is_well_met(NSEP4)
        assert NSEP4.meet("a", "b") == "c"

    def test_fork3_vacuous(self):
        assert is_well_met(FORK3)

    def test_nwm5_fails(self):
        assert compatible(NWM5, "a", "b")
        assert NWM5.meet("a", "b") is None
        assert not is_well_met(NWM5)


class TestGenericFilters:
    def test_fork3(self):
        got = [members(g) for g in generic_filters(FORK3)]
        assert got == [("1", "a"), ("1", "b")]

    def test_nsep4_single(self):
        got = [members(g) for g in generic_filters(NSEP4)]
        assert got == [("1", "a", "b", "c")]

    def test_generics_meet_every_dense_set(self):
        for P in FIXTURES.values():
            dense_sets = [
                S for S in subsets(P.elements) if S and naive_dense(P, S)
            ]
            for g in generic_filters(P):
                for S in dense_sets:
                    assert g.members & S

    def test_generics_are_maximal(self):
        for P in FIXTURES.values():
            gens = set(generic_filters(P))
            for f in enumerate_filters(P):
                bigger = [
                    h
                    for h in enumerate_filters(P)
                    if f.members < h.members
                ]
                if not bigger:
                    assert f in gens


class TestSeparativity:
    def test_fixture_flags(self):
        assert is_separative(FORK3)
        assert not is_separative(NSEP4)
        assert not is_separative(CH2)


@given(st.sets(st.sampled_from(sorted(NSEP4.elements)), max_size=4))
def test_classify_flags_match_oracle_hypothesis(S):
    c = classify(NSEP4, S)
    assert c.dense == naive_dense(NSEP4, S)
    assert c.predense == naive_predense(NSEP4, S)
    assert c.maximal_antichain == (c.antichain and c.predense)


@given(
    st.sampled_from(["CH2", "FORK3", "NSEP4"]),
    st.sets(st.sampled_from(["1", "a", "b", "c"]), min_size=1, max_size=4),
)
def test_generated_filter_is_smallest_hypothesis(fixture, S):
    P = FIXTURES[fixture]
    S = {s for s in S if s in set(P.elements)}
    if not S:
        return
    containing = [F for F in naive_filters(P) if S <= F]
    try:
        f = generated_filter(P, S)
    except FilterError:
        assert not containing
        return
    assert f.members in containing
    assert all(f.members <= F for F in containing)
