"""Hereditary names over a finite forcing.

A name is either a check leaf wrapping an urelement (a natural number from
the declared base set) or a finite set of (child name, condition) entries.
Ground values are hereditarily finite sets over the urelements, modeled as
plain ints and frozensets; an urelement is never equal to a set.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

from .dsl import Cursor, ParseError
from .order import is_well_met, compatible


class NameStructureError(ValueError):
    """Violated precondition on a name's rank, boundedness or shape."""


# -- hereditarily finite ground values ----------------------------------------


def hf_key(x):
    """Deterministic sort key: urelements before sets, then recursive."""
    if isinstance(x, int):
        return (0, x, ())
    return (1, len(x), tuple(sorted(hf_key(y) for y in x)))


def hf_repr(x):
    if isinstance(x, int):
        return str(x)
    return "{" + ",".join(hf_repr(y) for y in sorted(x, key=hf_key)) + "}"


def hf_depth(x):
    """Construction depth over the urelements: 0 for urelements and for {}."""
    if isinstance(x, int):
        return 0
    return 1 + max((hf_depth(y) for y in x), default=-1)


def hf_max_branching(x):
    if isinstance(x, int):
        return 0
    return max([len(x)] + [hf_max_branching(y) for y in x])


def parse_hf_cursor(cur):
    tok = cur.current
    if tok.kind == "int":
        return int(cur.advance().text)
    if cur.accept("{"):
        items = []
        while not cur.peek("}"):
            items.append(parse_hf_cursor(cur))
            cur.accept(",")
        cur.expect("}")
        return frozenset(items)
    cur.error("expected a hereditarily finite set literal")


def parse_hf(text):
    cur = Cursor(text)
    value = parse_hf_cursor(cur)
    if not cur.at_end():
        cur.error("trailing input after set literal")
    return value


# -- names ---------------------------------------------------------------------


@dataclass(frozen=True)
class PName:
    leaf: int = None
    entries: tuple = ()

    @property
    def is_leaf(self):
        return self.leaf is not None

    @property
    def is_empty(self):
        return self.leaf is None and not self.entries

    def __hash__(self):
        # names are deeply nested and hashed constantly in memo keys
        try:
            return object.__getattribute__(self, "_hash")
        except AttributeError:
            h = hash((self.leaf, self.entries))
            object.__setattr__(self, "_hash", h)
            return h

    def __repr__(self):
        if self.is_leaf:
            return f"chk {self.leaf}"
        inner = ", ".join(f"({child!r}, {cond})" for child, cond in self.entries)
        return "{" + inner + "}"


_INTERN = {}


def _intern(nm):
    got = _INTERN.get(nm)
    if got is None:
        _INTERN[nm] = nm
        got = nm
    return got


EMPTY = _intern(PName())


def check_leaf(x):
    if not isinstance(x, int):
        raise NameStructureError("check leaves wrap urelements (ints)")
    return _intern(PName(leaf=x))


@lru_cache(maxsize=None)
def name_key(s):
    if s.is_leaf:
        return (0, s.leaf, ())
    return (1, len(s.entries), tuple((name_key(c), p) for c, p in s.entries))


def make_name(pairs):
    """Canonical entries name: deduped and sorted (entry sets, not multisets)."""
    uniq = set()
    for child, cond in pairs:
        if not isinstance(child, PName) or not isinstance(cond, str):
            raise NameStructureError("entries must be (PName, condition id) pairs")
        uniq.add((_intern(child), cond))
    entries = tuple(sorted(uniq, key=lambda e: (name_key(e[0]), e[1])))
    return _intern(PName(entries=entries))


@lru_cache(maxsize=None)
def check_name(x, top):
    """The canonical name for a ground value: every condition is the top."""
    if isinstance(x, int):
        return check_leaf(x)
    return make_name((check_name(y, top), top) for y in x)


@lru_cache(maxsize=None)
def rank(s):
    """Recursion depth: 0 for leaves and the empty name."""
    if s.is_leaf:
        return 0
    return max((rank(c) + 1 for c, _ in s.entries), default=0)


def children(s):
    """Distinct child names in canonical order."""
    if s.is_leaf:
        return ()
    seen = []
    for c, _ in s.entries:
        if c not in seen:
            seen.append(c)
    return tuple(seen)


def conditions_of(s, child):
    return tuple(sorted(p for c, p in s.entries if c == child))


def is_check(s, top):
    """True iff s is (hereditarily) a check name for some ground value."""
    if s.is_leaf:
        return True
    if any(p != top for _, p in s.entries):
        return False
    kids = children(s)
    return len(kids) == len(s.entries) and all(is_check(c, top) for c in kids)


def name_base(s):
    """Urelements appearing anywhere in the name."""
    if s.is_leaf:
        return frozenset({s.leaf})
    out = set()
    for c, _ in s.entries:
        out |= name_base(c)
    return frozenset(out)


def is_rank1_over_base(s):
    """Rank <= 1 with every child a check leaf (an urelement-set name)."""
    if s.is_leaf:
        return True
    return all(c.is_leaf for c, _ in s.entries)


def is_kappa_small(s, n):
    """At most n distinct children, hereditarily."""
    if s.is_leaf:
        return True
    kids = children(s)
    return len(kids) <= n and all(is_kappa_small(c, n) for c in kids)


def is_lambda_bounded(s, m):
    """At most m conditions per distinct child, hereditarily."""
    if s.is_leaf:
        return True
    for c in children(s):
        if len(conditions_of(s, c)) > m:
            return False
    return all(is_lambda_bounded(c, m) for c in children(s))


# -- interpretation -------------------------------------------------------------


@lru_cache(maxsize=None)
def _interp(s, members):
    if s.is_leaf:
        return s.leaf
    return frozenset(_interp(c, members) for c, p in s.entries if p in members)


def interpret(s, g):
    """Recursive interpretation by a filter."""
    return _interp(s, g.members)


def quasi_interpret(s, g, base=None):
    """Ground values whose membership in s is forced by some member of g.

    Only defined for rank <= 1 names over the urelement base; candidates
    default to the urelements appearing in the name.
    """
    if not is_rank1_over_base(s):
        raise NameStructureError(
            "quasi-interpretation needs a rank <= 1 name over base urelements"
        )
    from . import semantics  # forcing is decided by the semantics module

    P = g.poset
    candidates = sorted(base) if base is not None else sorted(name_base(s))
    out = set()
    for x in candidates:
        value = semantics.bval_mem_names(P, check_leaf(x), s)
        if any(semantics.embed_below(P, p, value) for p in g.members):
            out.add(x)
    return frozenset(out)


def canonicalize(s, B):
    """Collapse a rank <= 1 name over a Boolean algebra to one condition per
    ground value (the supremum of its conditions); interpretation and
    quasi-interpretation then agree on every filter."""
    if not is_rank1_over_base(s):
        raise NameStructureError("canonicalize needs a rank <= 1 name over urelements")
    out = []
    for child in children(s):
        sup = B.sup(B.id_element(p) for p in conditions_of(s, child))
        if sup:
            out.append((child, B.element_id(sup)))
    return make_name(out)


def split_bounded(s, m):
    """Split an m-bounded rank-1 name into m many 1-bounded names.

    The delta-th output collects, for each ground value, the delta-th of its
    sorted conditions (absent when it has fewer). Entry sets union back to s.
    """
    if not is_rank1_over_base(s):
        raise NameStructureError("split needs a rank <= 1 name over urelements")
    if not is_lambda_bounded(s, m):
        raise NameStructureError(f"name is not {m}-bounded")
    parts = []
    for delta in range(m):
        entries = []
        for child in children(s):
            conds = conditions_of(s, child)
            if delta < len(conds):
                entries.append((child, conds[delta]))
        parts.append(make_name(entries))
    return tuple(parts)


def restrict_to_cone(P, s, p):
    """Push a rank-1 name below p by meeting each condition with p.

    Entries whose condition is incompatible with p can never fire below p
    and are dropped. Needs a well-met poset so the meets exist.
    """
    if not is_well_met(P):
        raise NameStructureError(f"{P.label} is not well-met")
    if not is_rank1_over_base(s):
        raise NameStructureError("cone restriction needs a rank <= 1 name")
    P.check_element(p)
    entries = []
    for child, q in s.entries:
        if compatible(P, q, p):
            entries.append((child, P.meet(q, p)))
    return make_name(entries)


# -- canonical enumeration ---------------------------------------------------------


def name_weight(s):
    """Total number of entries, hereditarily."""
    if s.is_leaf:
        return 0
    return len(s.entries) + sum(name_weight(c) for c, _ in s.entries)


def enumerate_names(
    P,
    max_rank=1,
    max_entries=2,
    max_weight=None,
    base=(0, 1),
    small=None,
    bound=None,
    conditions=None,
):
    """All names within the caps, in canonical order, duplicates removed.

    Layer r consists of layer r-1 plus every entry set over layer r-1
    children (at most max_entries per name, total hereditary weight at most
    max_weight). The empty name arises as the empty entry set at rank 1.
    `conditions` restricts the condition pool (defaults to all of P).
    """
    conds = tuple(sorted(conditions)) if conditions is not None else P.elements
    for c in conds:
        P.check_element(c)
    layer = [check_leaf(x) for x in sorted(base)]
    seen = set(layer)
    for _ in range(max_rank):
        candidates = [(child, q) for child in layer for q in conds]
        new = []
        for r in range(0, max_entries + 1):
            for combo in itertools.combinations(candidates, r):
                if max_weight is not None:
                    w = len(combo) + sum(name_weight(c) for c, _ in combo)
                    if w > max_weight:
                        continue
                nm = make_name(combo)
                if nm not in seen:
                    seen.add(nm)
                    new.append(nm)
        layer = layer + new
    out = [s for s in layer if rank(s) <= max_rank]
    if small is not None:
        out = [s for s in out if is_kappa_small(s, small)]
    if bound is not None:
        out = [s for s in out if is_lambda_bounded(s, bound)]
    out.sort(key=lambda s: (rank(s), name_weight(s), name_key(s)))
    return tuple(out)


# -- DSL -------------------------------------------------------------------------


def _parse_name_expr(cur, P, env):
    if cur.accept("chk"):
        return check_name(parse_hf_cursor(cur), P.top)
    if cur.peek("{"):
        cur.expect("{")
        pairs = []
        while not cur.peek("}"):
            cur.expect("(")
            child = _parse_name_expr(cur, P, env)
            cur.expect(",")
            tok = cur.advance()
            if tok.text not in set(P.elements):
                raise ParseError(
                    f"unknown condition {tok.text!r} in {P.label}", tok.line, tok.col
                )
            cur.expect(")")
            cur.accept(",")
            pairs.append((child, tok.text))
        cur.expect("}")
        return make_name(pairs)
    tok = cur.current
    if tok.kind in ("id", "int") and tok.text in env:
        cur.advance()
        return env[tok.text]
    cur.error("expected 'chk', '{' or a previously declared name")


def parse_names(text, P):
    """Parse a sequence of `name ID = EXPR;` declarations against a poset."""
    cur = Cursor(text)
    env = {}
    while not cur.at_end():
        cur.expect("name")
        ident = cur.expect(kind=None, what="name identifier").text
        cur.expect("=")
        env[ident] = _parse_name_expr(cur, P, env)
        cur.expect(";")
    return env


def name_to_dsl(s, top):
    """Render a name in the DSL (uses chk form for check names)."""
    if s.is_leaf:
        return f"chk {s.leaf}"
    if is_check(s, top):
        return f"chk {hf_repr(_check_value(s))}"
    inner = " ".join(
        f"({name_to_dsl(c, top)}, {p})" for c, p in s.entries
    )
    return "{ " + inner + " }" if inner else "{ }"


def _check_value(s):
    if s.is_leaf:
        return s.leaf
    return frozenset(_check_value(c) for c, _ in s.entries)
