import pytest

from forcelab.names import check_leaf, check_name, interpret, make_name, parse_hf
from forcelab.order import (
    CH2,
    FIXTURES,
    FORK3,
    NSEP4,
    NWM5,
    Filter,
    enumerate_filters,
    generic_filters,
)
from forcelab.principles import (
    ALL,
    AT_LEAST,
    CONTAINS,
    NONEMPTY,
    LargenessPredicate,
    PrincipleError,
    check_FA,
    check_N,
    check_monotone,
    check_phi_N,
    check_simultaneous_N,
    hamkins_pipeline,
    is_partition_regular,
    parse_largeness,
    register,
    trace,
    verify_witness,
)
from forcelab.semantics import forces, parse_formula
from forcelab.synth import encode_family_as_name

C0 = check_leaf(0)
C1 = check_leaf(1)


def N(*pairs):
    return make_name(pairs)


def F(P, *members):
    return Filter(P, frozenset(members))


NONEMPTY_FORMULA = parse_formula("exists x in s (x = x)")


class TestLargeness:
    def test_monotone_builtins(self):
        for L in (ALL, NONEMPTY, AT_LEAST(2), CONTAINS({0, 1})):
            for k in range(6):
                assert check_monotone(L, k)

    def test_non_monotone_rejected(self):
        bad = LargenessPredicate("AVOIDS(0)", lambda x, k: 0 not in x)
        with pytest.raises(PrincipleError, match="monotone"):
            register(bad)

    def test_partition_regular_instances(self):
        assert is_partition_regular(NONEMPTY, 4, 2)
        assert is_partition_regular(AT_LEAST(1), 5, 3)
        assert is_partition_regular(CONTAINS({0}), 4, 2)

    def test_at_least_not_partition_regular(self):
        # |{0,1,2,3}| >= 4 but the two halves have size 2 each
        assert not is_partition_regular(AT_LEAST(4), 6, 2)
        assert not is_partition_regular(ALL, 3, 2)

    def test_parse(self):
        assert parse_largeness("ALL") is ALL
        assert parse_largeness("AT_LEAST(2)").accepts({3, 4}, 9)
        assert parse_largeness("CONTAINS(0,1)").accepts({0, 1, 5}, 9)
        with pytest.raises(PrincipleError):
            parse_largeness("HUGE")


class TestTrace:
    def test_examples(self):
        g = F(FORK3, "1", "a")
        assert trace(g, [{"a", "b"}, {"b"}]) == frozenset({0})
        assert trace(F(FORK3, "1"), [{"a"}, {"b"}]) == frozenset()
        assert trace(g, [{"a"}, {"a", "b"}, {"b"}]) == frozenset({0, 1})

    def test_monotone_in_filter(self):
        dsets = [{"a"}, {"b"}, {"a", "b"}]
        for g in enumerate_filters(FORK3):
            for h in enumerate_filters(FORK3):
                if g.members <= h.members:
                    assert trace(g, dsets) <= trace(h, dsets)


class TestCheckFA:
    def test_fork3_holds(self):
        r = check_FA(FORK3, [{"a", "b"}, {"a", "b"}], ALL)
        assert r.holds and r.witness.sorted_members == ("1", "a")
        assert verify_witness(r, FORK3, dsets=[{"a", "b"}, {"a", "b"}], L=ALL)

    def test_incompatible_fails(self):
        r = check_FA(FORK3, [{"a"}, {"b"}], ALL, require="off")
        assert not r.holds
        assert r.filters_checked == len(enumerate_filters(FORK3))

    def test_empty_family_vacuous(self):
        for P in FIXTURES.values():
            r = check_FA(P, [], ALL)
            assert r.holds and r.witness.sorted_members == (P.top,)

    def test_dense_precondition(self):
        with pytest.raises(PrincipleError, match="dense"):
            check_FA(FORK3, [{"a"}], ALL)

    def test_predense_flag(self):
        r = check_FA(NSEP4, [{"a"}], ALL, require="predense")
        assert r.holds

    def test_dense_all_always_holds_on_finite_posets(self):
        # atom-generated filters are generic; this is the desk-scale sanity law
        from oracles import naive_dense, subsets

        for P in FIXTURES.values():
            dense_sets = [S for S in subsets(P.elements) if S and naive_dense(P, S)]
            r = check_FA(P, dense_sets, ALL)
            assert r.holds


class TestCheckN:
    def test_fork3_example(self):
        s = N((C0, "a"), (C0, "b"))
        r = check_N(FORK3, s, parse_hf("{0}"))
        assert r.holds and r.witness.sorted_members == ("1", "a")

    def test_check_name_trivial_witness(self):
        r = check_N(FORK3, check_name(parse_hf("{0}"), "1"), parse_hf("{0}"))
        assert r.holds and r.witness.sorted_members == ("1",)

    def test_hypothesis_failure(self):
        s = N((C0, "a"))  # not forced equal to {0} by the top
        with pytest.raises(PrincipleError, match="hypothesis"):
            check_N(FORK3, s, parse_hf("{0}"))

    def test_flag_mismatch(self):
        s = N((C0, "a"), (C0, "b"))
        with pytest.raises(PrincipleError, match="bounded"):
            check_N(FORK3, s, parse_hf("{0}"), bounded=1)
        with pytest.raises(PrincipleError, match="rank"):
            check_N(FORK3, s, parse_hf("{0}"), max_rank=0)

    def test_one_bounded_triviality(self):
        # BN^1 sanity: a 1-bounded rank-1 name forced equal to a value is
        # correctly interpreted by an atom-respecting witness
        cases = [
            (NSEP4, N((C0, "b")), parse_hf("{0}")),
            (CH2, N((C0, "a")), parse_hf("{0}")),
            (FORK3, check_name(parse_hf("{0,1}"), "1"), parse_hf("{0,1}")),
        ]
        for P, s, value in cases:
            r = check_N(P, s, value)
            assert r.holds
            assert any(
                interpret(s, G) == value for G in generic_filters(P)
            )

    def test_generic_witness_exists_when_top_does_not_work(self):
        s = N((C0, "b"))
        value = parse_hf("{0}")
        r = check_N(NSEP4, s, value)
        assert r.holds
        assert interpret(s, Filter(NSEP4, frozenset({"1"}))) != value
        assert any(interpret(s, G) == value for G in generic_filters(NSEP4))


class TestCheckPhiN:
    def test_nonempty_example(self):
        s = N((C0, "a"), (C1, "b"))
        r = check_phi_N(FORK3, s, NONEMPTY_FORMULA, NONEMPTY)
        assert r.holds and r.witness.sorted_members == ("1", "a")

    def test_contains_example(self):
        s = N((C0, "a"), (C0, "b"))
        f = parse_formula("chk 0 in s")
        r = check_phi_N(FORK3, s, f, CONTAINS({0}))
        assert r.holds

    def test_hypothesis_not_forced(self):
        with pytest.raises(PrincipleError, match="hypothesis"):
            check_phi_N(FORK3, check_name(frozenset(), "1"), NONEMPTY_FORMULA, NONEMPTY)

    def test_formula_arity(self):
        with pytest.raises(PrincipleError, match="free variable"):
            check_phi_N(FORK3, N((C0, "a")), parse_formula("s in t"), NONEMPTY)


class TestSimultaneous:
    def test_check_name_any_filter(self):
        r = check_simultaneous_N(FORK3, {"s": check_name(parse_hf("{0}"), "1")})
        assert r.holds and r.witness == enumerate_filters(FORK3)[0]

    def test_forced_equality_needs_right_filter(self):
        s = N((C0, "a"), (C0, "b"))
        r = check_simultaneous_N(FORK3, {"s": s})
        assert r.holds
        assert r.witness.sorted_members in (("1", "a"), ("1", "b"))

    def test_entry_disjoint_alignment(self):
        s = N((C0, "a"), (C0, "b"))
        t = N((C0, "1"))
        f = parse_formula("s = t")
        assert forces(FORK3, "1", f, {"s": s, "t": t})
        r = check_simultaneous_N(FORK3, {"s": s, "t": t})
        assert r.holds
        g = r.witness
        assert interpret(s, g) == interpret(t, g)
        assert g.sorted_members != ("1",)

    def test_implies_plain_N(self):
        s = N((C0, "a"), (C0, "b"))
        r = check_simultaneous_N(FORK3, {"s": s})
        value = parse_hf("{0}")
        assert forces(FORK3, "1", parse_formula("s = chk {0}"), {"s": s})
        assert interpret(s, r.witness) == value


class TestHamkinsPipeline:
    def test_one_bounded_degenerate(self):
        s = N((C0, "a"), (C1, "b"))  # 1-bounded on NSEP4? entries conds a,b exist
        r = hamkins_pipeline(NSEP4, s, NONEMPTY, m=1)
        assert r.holds

    def test_nsep4_two_bounded(self):
        s = N((C0, "a"), (C0, "b"))
        r = hamkins_pipeline(NSEP4, s, NONEMPTY)
        assert r.holds
        assert any("split into 2" in line for line in r.log)
        assert any("cone" in line for line in r.log)
        assert NONEMPTY.accepts(interpret(s, r.witness), 1)

    def test_not_well_met_rejected(self):
        with pytest.raises(PrincipleError, match="well-met"):
            hamkins_pipeline(NWM5, N((C0, "c"), (C0, "d")), NONEMPTY)

    def test_not_partition_regular_rejected(self):
        s = N((C0, "a"), (C0, "b"), (C1, "a"), (C1, "b"))
        with pytest.raises(PrincipleError, match="partition-regular"):
            hamkins_pipeline(NSEP4, s, ALL)

    def test_hypothesis_failure(self):
        s = N((C0, "c"))
        # the single generic of NSEP4 interprets s = {0}: largeness CONTAINS(1) fails
        with pytest.raises(PrincipleError, match="hypothesis"):
            hamkins_pipeline(NSEP4, s, CONTAINS({1}))

    def test_transfer_on_chain_posets(self):
        from forcelab.order import make_poset

        P = make_poset(
            ["1", "a", "b", "c"], [("a", "1"), ("b", "a"), ("c", "b")], label="CH4"
        )
        s = N((C0, "a"), (C0, "b"), (C1, "c"))
        r = hamkins_pipeline(P, s, NONEMPTY, m=2)
        assert r.holds


class TestCorrespondenceSmall:
    def test_fa_iff_n_witness_transfer(self):
        dsets = [frozenset({"a", "b"}), frozenset({"1", "a", "b"})]
        values = [parse_hf("{0}"), parse_hf("{1}")]
        sigma = encode_family_as_name(FORK3, dsets, values)
        A = frozenset(values)
        fa = check_FA(FORK3, dsets, ALL)
        n = check_N(FORK3, sigma, A)
        assert fa.holds == n.holds == True
        # the same filter witnesses both directions
        assert trace(fa.witness, dsets) == frozenset({0, 1})
        assert interpret(sigma, fa.witness) == A
        assert trace(n.witness, dsets) == frozenset({0, 1})
