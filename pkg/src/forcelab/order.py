"""Finite posets with a top element: compatibility, density, filters,
separative quotients, cones and meets.

Conditions are opaque string identifiers; every iteration is in sorted
(lexicographic) order so all outputs are deterministic.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache

from .dsl import Cursor, ParseError


class PosetError(ValueError):
    """Structural problem with an order: cycle, missing maximum, unknown id."""


class FilterError(ValueError):
    """A member set violates the filter axioms or cannot generate a filter."""


@dataclass(frozen=True)
class Poset:
    """Finite partial order with a largest element.

    `pairs` holds the full reflexive-transitive relation as (lower, upper)
    tuples. Construction validates reflexivity, antisymmetry, transitivity
    and uniqueness of the maximum.
    """

    elements: tuple
    top: str
    pairs: frozenset
    label: str = field(default="P", compare=False)

    def __post_init__(self):
        elems = self.elements
        if len(elems) < 1:
            raise PosetError("poset needs at least one element")
        if tuple(sorted(elems)) != elems or len(set(elems)) != len(elems):
            raise PosetError("elements must be sorted and distinct")
        eset = set(elems)
        for a, b in self.pairs:
            if a not in eset or b not in eset:
                raise PosetError(f"relation mentions unknown element {a!r}<={b!r}")
        for a in elems:
            if (a, a) not in self.pairs:
                raise PosetError("relation is not reflexive")
        for a, b in self.pairs:
            if a != b and (b, a) in self.pairs:
                raise PosetError(f"cycle detected: {a} and {b} are mutually below each other")
        for a, b in self.pairs:
            for c in elems:
                if (b, c) in self.pairs and (a, c) not in self.pairs:
                    raise PosetError("relation is not transitive")
        if self.top not in eset:
            raise PosetError(f"top {self.top!r} is not an element")
        for a in elems:
            if (a, self.top) not in self.pairs:
                raise PosetError(f"{self.top!r} is not a maximum ({a!r} is not below it)")

    # -- basic order queries ------------------------------------------------

    def leq(self, p, q):
        return (p, q) in self.pairs

    def check_element(self, p):
        if p not in set(self.elements):
            raise PosetError(f"unknown element {p!r} in {self.label}")

    def below(self, p):
        """All q <= p, sorted."""
        return tuple(q for q in self.elements if (q, p) in self.pairs)

    def above(self, p):
        """All q >= p, sorted."""
        return tuple(q for q in self.elements if (p, q) in self.pairs)

    def strictly_below(self, p):
        return tuple(q for q in self.elements if q != p and (q, p) in self.pairs)

    def minimal_elements(self):
        return tuple(p for p in self.elements if len(self.below(p)) == 1)

    def covers(self):
        """Cover pairs (lower, upper) with nothing strictly in between."""
        out = []
        for a, b in sorted(self.pairs):
            if a == b:
                continue
            if any(
                c != a and c != b and (a, c) in self.pairs and (c, b) in self.pairs
                for c in self.elements
            ):
                continue
            out.append((a, b))
        return tuple(out)

    def meet(self, p, q):
        """Greatest lower bound of p and q, or None if there is none."""
        common = [r for r in self.elements if self.leq(r, p) and self.leq(r, q)]
        for m in common:
            if all(self.leq(r, m) for r in common):
                return m
        return None

    def restrict(self, subset, top, label=None):
        elems = tuple(sorted(subset))
        sub = set(elems)
        pairs = frozenset((a, b) for (a, b) in self.pairs if a in sub and b in sub)
        return Poset(elems, top, pairs, label=label or self.label)


@dataclass(frozen=True)
class Filter:
    """Upward-closed, downward-directed subset of a poset.

    The empty set is tolerated only when constructed explicitly; any nonempty
    filter automatically contains the top element.
    """

    poset: Poset
    members: frozenset

    def __post_init__(self):
        P = self.poset
        eset = set(P.elements)
        for m in self.members:
            if m not in eset:
                raise FilterError(f"filter member {m!r} is not a poset element")
        for m in self.members:
            for q in P.above(m):
                if q not in self.members:
                    raise FilterError(f"not upward closed: {m!r} in, {q!r} out")
        for p, q in itertools.combinations(sorted(self.members), 2):
            if not any(P.leq(r, p) and P.leq(r, q) for r in self.members):
                raise FilterError(f"not directed: {p!r}, {q!r} have no bound inside")
        if self.members and P.top not in self.members:
            raise FilterError("nonempty filter must contain the top element")

    @property
    def sorted_members(self):
        return tuple(sorted(self.members))

    def generator(self):
        """The minimum member (every finite filter is principal)."""
        for m in sorted(self.members):
            if all(self.poset.leq(m, x) for x in self.members):
                return m
        return None

    def __repr__(self):
        return "{" + ",".join(self.sorted_members) + "}"


@dataclass(frozen=True)
class CondSet:
    """Set of conditions with its density/antichain classification.

    Flags are None when the set has not been classified.
    """

    members: frozenset
    dense: bool = None
    predense: bool = None
    antichain: bool = None
    maximal_antichain: bool = None

    @property
    def flavor(self):
        if self.dense:
            return "dense"
        if self.predense:
            return "predense"
        if self.antichain:
            return "antichain"
        if self.dense is None:
            return "unclassified"
        return "unclassified"

    @property
    def sorted_members(self):
        return tuple(sorted(self.members))

    def __repr__(self):
        return "{" + ",".join(self.sorted_members) + "}"


# -- operations --------------------------------------------------------------


def compatible(P, p, q):
    """True iff p and q have a common lower bound in P."""
    P.check_element(p)
    P.check_element(q)
    return any(P.leq(r, p) and P.leq(r, q) for r in P.elements)


def classify(P, members):
    """Classify a set of conditions as dense / predense / (maximal) antichain."""
    S = frozenset(members)
    for s in S:
        P.check_element(s)
    dense = all(any(P.leq(s, p) for s in S) for p in P.elements)
    predense = all(any(compatible(P, s, p) for s in S) for p in P.elements)
    antichain = all(
        not compatible(P, a, b) for a, b in itertools.combinations(sorted(S), 2)
    )
    return CondSet(
        members=S,
        dense=dense,
        predense=predense,
        antichain=antichain,
        maximal_antichain=antichain and predense,
    )


@lru_cache(maxsize=None)
def enumerate_filters(P, include_empty=False):
    """All filters of P in deterministic (size, members) order.

    In a finite poset every nonempty filter is principal: a directed finite
    set has a minimum, so the filter is the up-set of that minimum. The test
    suite cross-validates this against a raw subset scan.
    """
    filters = [Filter(P, frozenset(P.above(m))) for m in P.elements]
    filters.sort(key=lambda f: (len(f.members), f.sorted_members))
    if include_empty:
        filters.insert(0, Filter(P, frozenset()))
    return tuple(filters)


def generated_filter(P, generators):
    """Smallest filter containing the generators.

    Closes under pairwise greatest lower bounds, then upward. Raises
    FilterError when two members of the closure have no common lower bound
    (incompatible generators) or when the closure fails to be directed.
    """
    gens = set(generators)
    for g in gens:
        P.check_element(g)
    if not gens:
        return Filter(P, frozenset({P.top}))
    closed = set(gens)
    changed = True
    while changed:
        changed = False
        for p, q in itertools.combinations(sorted(closed), 2):
            if not compatible(P, p, q):
                raise FilterError(f"incompatible generators: {p!r}, {q!r}")
            m = P.meet(p, q)
            if m is not None and m not in closed:
                closed.add(m)
                changed = True
    up = set()
    for m in closed:
        up.update(P.above(m))
    for p, q in itertools.combinations(sorted(up), 2):
        if not any(P.leq(r, p) and P.leq(r, q) for r in up):
            raise FilterError(
                f"generators are not closable into a filter: {p!r}, {q!r} "
                "have no greatest lower bound"
            )
    return Filter(P, frozenset(up))


def _preceq(P, p, q):
    """Separative preorder: every extension of p is compatible with q."""
    return all(compatible(P, r, q) for r in P.below(p))


def separative_quotient(P):
    """Quotient by the separative preorder.

    Returns (quotient poset, element -> class id). Class ids are the sorted
    members joined with '|' (a singleton class keeps its element's id), so
    quotienting an already-separative poset is the identity.
    """
    elems = P.elements
    pre = {(p, q): _preceq(P, p, q) for p in elems for q in elems}
    classes = []
    assigned = {}
    for p in elems:
        if p in assigned:
            continue
        cls = [q for q in elems if pre[(p, q)] and pre[(q, p)]]
        for q in cls:
            assigned[q] = None
        classes.append(tuple(sorted(cls)))
    ids = {}
    for cls in classes:
        cid = cls[0] if len(cls) == 1 else "|".join(cls)
        for m in cls:
            ids[m] = cid
    qelems = tuple(sorted(set(ids.values())))
    qpairs = set()
    for cls_a in classes:
        for cls_b in classes:
            if pre[(cls_a[0], cls_b[0])]:
                qpairs.add((ids[cls_a[0]], ids[cls_b[0]]))
    quotient = Poset(
        qelems, ids[P.top], frozenset(qpairs), label=f"{P.label}/sep"
    )
    return quotient, ids


def cone(P, p):
    """Restriction of P to the conditions below p, with top p."""
    P.check_element(p)
    return P.restrict(P.below(p), p, label=f"{P.label}@{p}")


def is_well_met(P):
    """True iff every compatible pair has a greatest lower bound."""
    for p, q in itertools.combinations(P.elements, 2):
        if compatible(P, p, q) and P.meet(p, q) is None:
            return False
    return True


def is_separative(P):
    quotient, ids = separative_quotient(P)
    return len(quotient.elements) == len(P.elements)


@lru_cache(maxsize=None)
def generic_filters(P):
    """The atom-generated maximal filters, in deterministic order.

    One filter per minimal class of the separative quotient: all conditions
    whose class lies above it. On finite posets these are exactly the filters
    meeting every dense set.
    """
    quotient, ids = separative_quotient(P)
    out = []
    for m in quotient.minimal_elements():
        rep = min(p for p in P.elements if ids[p] == m)
        members = frozenset(q for q in P.elements if _preceq(P, rep, q))
        out.append(Filter(P, members))
    out.sort(key=lambda f: (len(f.members), f.sorted_members))
    return tuple(out)


# -- DSL ----------------------------------------------------------------------


def parse_poset(text):
    """Parse a poset declaration.

    Grammar::

        poset NAME { elems id+ ; order (id<id)* ; [top id ;] }

    Only covers are declared; the reflexive-transitive closure is computed.
    The top is the declared one or else the unique maximum.
    """
    cur = Cursor(text)
    cur.expect("poset")
    name = cur.expect(kind=None, what="poset name").text
    cur.expect("{")
    cur.expect("elems")
    elems = []
    while not cur.peek(";"):
        tok = cur.current
        if tok.kind not in ("id", "int"):
            cur.error("expected element identifier")
        if tok.text in elems:
            raise ParseError(f"duplicate element {tok.text!r}", tok.line, tok.col)
        elems.append(cur.advance().text)
    cur.expect(";")
    if not elems:
        cur.error("poset needs at least one element")
    covers = []
    declared_top = None
    while not cur.peek("}"):
        if cur.accept("order"):
            while not cur.peek(";"):
                lo = cur.advance()
                if lo.kind not in ("id", "int"):
                    raise ParseError("expected element identifier", lo.line, lo.col)
                cur.expect("<")
                hi = cur.advance()
                if hi.kind not in ("id", "int"):
                    raise ParseError("expected element identifier", hi.line, hi.col)
                for t in (lo, hi):
                    if t.text not in elems:
                        raise ParseError(f"unknown element {t.text!r}", t.line, t.col)
                covers.append((lo.text, hi.text))
            cur.expect(";")
        elif cur.accept("top"):
            tok = cur.advance()
            if tok.text not in elems:
                raise ParseError(f"unknown element {tok.text!r}", tok.line, tok.col)
            declared_top = tok.text
            cur.expect(";")
        else:
            cur.error("expected 'order', 'top' or '}'")
    cur.expect("}")
    if not cur.at_end():
        cur.error("trailing input after poset declaration")
    return make_poset(elems, covers, top=declared_top, label=name)


def make_poset(elements, covers, top=None, label="P"):
    """Build a poset from declared covers, computing the closure."""
    elems = tuple(sorted(elements))
    pairs = {(e, e) for e in elems}
    for lo, hi in covers:
        if lo == hi:
            raise PosetError(f"self-loop {lo!r}<{hi!r}")
        pairs.add((lo, hi))
    changed = True
    while changed:
        changed = False
        for (a, b), (c, d) in itertools.product(tuple(pairs), repeat=2):
            if b == c and (a, d) not in pairs:
                pairs.add((a, d))
                changed = True
    for a, b in pairs:
        if a != b and (b, a) in pairs:
            raise PosetError(f"cycle detected through {a!r} and {b!r}")
    maxima = [e for e in elems if all((x, e) in pairs for x in elems)]
    if top is None:
        if len(maxima) != 1:
            raise PosetError(f"no unique maximum (maximal elements: {maxima})")
        top = maxima[0]
    elif top not in maxima:
        raise PosetError(f"declared top {top!r} is not a maximum")
    return Poset(elems, top, frozenset(pairs), label=label)


def poset_dsl(P):
    """Render a poset back into the DSL (round-trips through parse_poset)."""
    covers = " ".join(f"{a}<{b}" for a, b in P.covers())
    order_clause = f" order {covers};" if covers else ""
    return f"poset {P.label} {{ elems {' '.join(P.elements)};{order_clause} top {P.top}; }}"


# -- fixtures -----------------------------------------------------------------

CH2 = make_poset(["1", "a"], [("a", "1")], label="CH2")
FORK3 = make_poset(["1", "a", "b"], [("a", "1"), ("b", "1")], label="FORK3")
NSEP4 = make_poset(
    ["1", "a", "b", "c"],
    [("a", "1"), ("b", "1"), ("c", "a"), ("c", "b")],
    label="NSEP4",
)
# Two incomparable lower bounds below a compatible pair: well-met fails.
NWM5 = make_poset(
    ["1", "a", "b", "c", "d"],
    [("a", "1"), ("b", "1"), ("c", "a"), ("c", "b"), ("d", "a"), ("d", "b")],
    label="NWM5",
)

FIXTURES = {"CH2": CH2, "FORK3": FORK3, "NSEP4": NSEP4, "NWM5": NWM5}
