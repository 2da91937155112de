"""Boolean completion of a finite poset.

For a finite poset the regular-open completion is the powerset of the
minimal classes of the separative quotient, which gives exact bit-set
arithmetic. Boolean elements are exposed as frozensets of atom ids and
printed as sorted atom lists joined with '+'.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

from .order import Filter, Poset, PosetError, separative_quotient


class BoolAlg:
    """Finite Boolean algebra with a dense embedding of a source poset."""

    def __init__(self, poset, quotient, class_of, atoms, embed):
        self.poset = poset
        self.quotient = quotient
        self.class_of = class_of
        self.atoms = atoms
        self.embed = embed
        self.atom_index = {a: i for i, a in enumerate(atoms)}
        self.zero = frozenset()
        self.one = frozenset(atoms)
        self._as_poset = None

    # -- arithmetic ----------------------------------------------------------

    def sup(self, xs):
        out = set()
        for x in xs:
            out |= x
        return frozenset(out)

    def inf(self, xs):
        xs = list(xs)
        if not xs:
            return self.one
        out = set(xs[0])
        for x in xs[1:]:
            out &= x
        return frozenset(out)

    def complement(self, x):
        return self.one - x

    def le(self, x, y):
        return x <= y

    def elements(self):
        """All 2^n elements in (size, atoms) order."""
        for r in range(len(self.atoms) + 1):
            for combo in itertools.combinations(self.atoms, r):
                yield frozenset(combo)

    # -- masks (internal fast arithmetic) -------------------------------------

    def mask_of(self, x):
        m = 0
        for a in x:
            m |= 1 << self.atom_index[a]
        return m

    def set_of(self, mask):
        return frozenset(a for a, i in self.atom_index.items() if mask >> i & 1)

    @property
    def one_mask(self):
        return (1 << len(self.atoms)) - 1

    def embed_mask(self, p):
        return self.mask_of(self.embed[p])

    # -- naming ---------------------------------------------------------------

    def element_id(self, x):
        if not x:
            return "0"
        return "+".join(sorted(x))

    def id_element(self, eid):
        if eid == "0":
            return frozenset()
        atoms = frozenset(eid.split("+"))
        unknown = atoms - set(self.atoms)
        if unknown:
            raise PosetError(f"unknown atoms {sorted(unknown)} in element id {eid!r}")
        return atoms

    def as_poset(self):
        """The nonzero elements as a forcing, ordered by inclusion."""
        if self._as_poset is None:
            ids = {}
            for x in self.elements():
                if x:
                    ids[self.element_id(x)] = x
            elems = tuple(sorted(ids))
            pairs = frozenset(
                (a, b) for a in elems for b in elems if ids[a] <= ids[b]
            )
            self._as_poset = Poset(
                elems,
                self.element_id(self.one),
                pairs,
                label=f"B({self.poset.label})",
            )
        return self._as_poset

    def __eq__(self, other):
        return isinstance(other, BoolAlg) and self.poset == other.poset

    def __hash__(self):
        return hash(("BoolAlg", self.poset))

    def __repr__(self):
        return f"BoolAlg(atoms={list(self.atoms)}, source={self.poset.label})"


@lru_cache(maxsize=None)
def complete(P):
    """Boolean completion of P with its dense embedding."""
    quotient, class_of = separative_quotient(P)
    atoms = quotient.minimal_elements()
    embed = {}
    for p in P.elements:
        embed[p] = frozenset(a for a in atoms if quotient.leq(a, class_of[p]))
    return BoolAlg(P, quotient, class_of, atoms, embed)


def ultrafilters(B):
    """The principal filters at the atoms, as filters on B.as_poset()."""
    PB = B.as_poset()
    out = []
    for a in B.atoms:
        members = frozenset(
            B.element_id(x) for x in B.elements() if a in x
        )
        out.append(Filter(PB, members))
    out.sort(key=lambda f: f.sorted_members)
    return tuple(out)


def ultrafilter_at(B, atom):
    if atom not in set(B.atoms):
        raise PosetError(f"unknown atom {atom!r}")
    PB = B.as_poset()
    return Filter(PB, frozenset(B.element_id(x) for x in B.elements() if atom in x))


def atom_of_ultrafilter(B, U):
    """The atom generating an ultrafilter; raises if U is not ultra."""
    gen = U.generator()
    if gen is not None:
        x = B.id_element(gen)
        if len(x) == 1:
            return next(iter(x))
    raise PosetError("filter is not an ultrafilter (not generated by an atom)")
