import itertools

import pytest

from forcelab.boolcomp import atom_of_ultrafilter, complete, ultrafilter_at, ultrafilters
from forcelab.order import (
    CH2,
    FIXTURES,
    FORK3,
    NSEP4,
    Filter,
    PosetError,
    classify,
    compatible,
    generic_filters,
    make_poset,
)

from oracles import naive_predense, subsets


class TestComplete:
    def test_fork3(self):
        B = complete(FORK3)
        assert B.atoms == ("a", "b")
        assert B.embed["a"] == frozenset({"a"})
        assert B.embed["1"] == frozenset({"a", "b"})

    def test_ch2_trivial(self):
        B = complete(CH2)
        assert len(B.atoms) == 1
        assert B.embed["1"] == B.embed["a"] == B.one

    def test_nsep4_trivial(self):
        B = complete(NSEP4)
        assert len(B.atoms) == 1
        assert all(B.embed[p] == B.one for p in NSEP4.elements)

    def test_embed_invariants(self):
        for P in FIXTURES.values():
            B = complete(P)
            assert B.embed[P.top] == B.one
            for p in P.elements:
                assert B.embed[p]
            for p, q in itertools.product(P.elements, repeat=2):
                if P.leq(p, q):
                    assert B.embed[p] <= B.embed[q]
                if not compatible(P, p, q):
                    assert not (B.embed[p] & B.embed[q])

    def test_image_dense(self):
        # every nonzero element dominates the embedding of some condition
        for P in FIXTURES.values():
            B = complete(P)
            for x in B.elements():
                if x:
                    assert any(B.embed[p] <= x for p in P.elements)

    def test_maximal_antichains_have_sup_one(self):
        for P in FIXTURES.values():
            B = complete(P)
            for S in subsets(P.elements):
                c = classify(P, S)
                if c.maximal_antichain:
                    assert B.sup(B.embed[p] for p in S) == B.one


class TestArithmetic:
    def test_fork3_sup(self):
        B = complete(FORK3)
        assert B.sup([frozenset({"a"}), frozenset({"b"})]) == B.one

    def test_empty_cases(self):
        B = complete(FORK3)
        assert B.complement(B.zero) == B.one
        assert B.sup([]) == B.zero
        assert B.inf([]) == B.one

    def test_inf_of_disjoint(self):
        B = complete(FORK3)
        assert B.inf([frozenset({"a"}), frozenset({"b"})]) == B.zero

    def test_de_morgan_and_distributivity(self):
        P = make_poset(
            ["1", "x", "y", "z"],
            [("x", "1"), ("y", "1"), ("z", "1")],
            label="FORK4",
        )
        B = complete(P)
        elems = list(B.elements())
        for x, y, z in itertools.product(elems, repeat=3):
            assert B.complement(x | y) == B.inf(
                [B.complement(x), B.complement(y)]
            )
            assert B.complement(x & y) == B.sup(
                [B.complement(x), B.complement(y)]
            )
            assert x & (y | z) == (x & y) | (x & z)
            assert x | (y & z) == (x | y) & (x | z)

    def test_element_id_roundtrip(self):
        B = complete(FORK3)
        for x in B.elements():
            assert B.id_element(B.element_id(x)) == x


class TestAsPoset:
    def test_fork3_three_conditions(self):
        PB = complete(FORK3).as_poset()
        assert PB.elements == ("a", "a+b", "b")
        assert PB.top == "a+b"
        assert PB.leq("a", "a+b")
        assert not compatible(PB, "a", "b")

    def test_completion_of_algebra_poset_is_same_algebra(self):
        B = complete(FORK3)
        B2 = complete(B.as_poset())
        assert len(B2.atoms) == len(B.atoms)


class TestUltrafilters:
    def test_fork3_two(self):
        B = complete(FORK3)
        us = ultrafilters(B)
        assert len(us) == 2
        assert [atom_of_ultrafilter(B, u) for u in us] == ["a", "b"]

    def test_trivial_algebra_one(self):
        B = complete(CH2)
        assert len(ultrafilters(B)) == 1

    def test_three_atoms_three(self):
        P = make_poset(
            ["1", "x", "y", "z"],
            [("x", "1"), ("y", "1"), ("z", "1")],
        )
        assert len(ultrafilters(complete(P))) == 3

    def test_not_ultra_rejected(self):
        B = complete(FORK3)
        PB = B.as_poset()
        with pytest.raises(PosetError, match="ultrafilter"):
            atom_of_ultrafilter(B, Filter(PB, frozenset({"a+b"})))

    def test_ultrafilters_meet_every_predense_set(self):
        for P in (CH2, FORK3, NSEP4):
            B = complete(P)
            PB = B.as_poset()
            for S in subsets(PB.elements):
                if S and naive_predense(PB, S):
                    for u in ultrafilters(B):
                        assert u.members & S

    def test_ultrafilter_at(self):
        B = complete(FORK3)
        u = ultrafilter_at(B, "a")
        assert u.members == frozenset({"a", "a+b"})


class TestGenericAgreement:
    def test_generic_filters_match_embedding(self):
        # atom-generated filters are exactly {p : atom in embed(p)}
        for P in FIXTURES.values():
            B = complete(P)
            expected = sorted(
                (
                    frozenset(p for p in P.elements if a in B.embed[p])
                    for a in B.atoms
                ),
                key=lambda s: (len(s), tuple(sorted(s))),
            )
            got = [g.members for g in generic_filters(P)]
            assert got == expected
