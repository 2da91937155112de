"""Checkers for forcing axioms and name principles at finite scale.

Largeness predicates are monotone criteria on traces standing in for the
classical bigness notions; reports carry a witness filter or an exhaustion
count and re-verify under independent evaluation.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .names import (
    interpret,
    is_kappa_small,
    is_lambda_bounded,
    is_rank1_over_base,
    name_base,
    rank,
    split_bounded,
    restrict_to_cone,
)
from .order import (
    Filter,
    classify,
    cone,
    enumerate_filters,
    generated_filter,
    generic_filters,
    is_well_met,
)
from .semantics import Eq, Lit, Var, eval_ground, forces, free_vars


class PrincipleError(ValueError):
    """Hypothesis or precondition failure; the CLI maps this to exit code 2."""


# -- largeness predicates ------------------------------------------------------


@dataclass(frozen=True)
class LargenessPredicate:
    name: str
    fn: object

    def accepts(self, trace, k):
        return self.fn(frozenset(trace), k)


def check_monotone(L, k):
    """Supersets of accepted sets must be accepted."""
    universe = range(k)
    for r in range(k + 1):
        for x in itertools.combinations(universe, r):
            xs = frozenset(x)
            if L.accepts(xs, k):
                for i in universe:
                    if not L.accepts(xs | {i}, k):
                        return False
    return True


def is_partition_regular(L, k, parts):
    """Whenever an accepted set splits into `parts` pieces, one is accepted.

    Exhaustive over all accepted subsets of {0..k-1} and all assignments of
    their elements to pieces.
    """
    universe = range(k)
    for r in range(k + 1):
        for x in itertools.combinations(universe, r):
            xs = frozenset(x)
            if not L.accepts(xs, k):
                continue
            items = sorted(xs)
            for assignment in itertools.product(range(parts), repeat=len(items)):
                pieces = [
                    frozenset(e for e, a in zip(items, assignment) if a == d)
                    for d in range(parts)
                ]
                if not any(L.accepts(piece, k) for piece in pieces):
                    return False
    return True


ALL = LargenessPredicate("ALL", lambda x, k: len(x) >= k)
NONEMPTY = LargenessPredicate("NONEMPTY", lambda x, k: bool(x))


def AT_LEAST(m):
    return LargenessPredicate(f"AT_LEAST({m})", lambda x, k: len(x) >= m)


def CONTAINS(required):
    req = frozenset(required)
    label = ",".join(str(i) for i in sorted(req))
    return LargenessPredicate(f"CONTAINS({label})", lambda x, k: req <= x)


_REGISTRY = {}


def register(L, max_k=8):
    """Register a predicate after verifying monotonicity."""
    for k in range(max_k + 1):
        if not check_monotone(L, k):
            raise PrincipleError(f"{L.name} is not monotone at k={k}")
    _REGISTRY[L.name] = L
    return L


for _L in (ALL, NONEMPTY, AT_LEAST(1), AT_LEAST(2), AT_LEAST(3), CONTAINS({0})):
    register(_L)


def parse_largeness(text):
    """Resolve 'ALL', 'NONEMPTY', 'AT_LEAST(m)' or 'CONTAINS(i,j,...)'."""
    text = text.strip()
    if text in _REGISTRY:
        return _REGISTRY[text]
    if text.startswith("AT_LEAST(") and text.endswith(")"):
        return register(AT_LEAST(int(text[9:-1])))
    if text.startswith("CONTAINS(") and text.endswith(")"):
        items = {int(t) for t in text[9:-1].split(",") if t.strip()}
        return register(CONTAINS(items))
    raise PrincipleError(f"unknown largeness predicate {text!r}")


# -- reports ---------------------------------------------------------------------


@dataclass(frozen=True)
class PrincipleReport:
    principle: str
    instance: str
    holds: bool
    witness: Filter = None
    filters_checked: int = 0
    log: tuple = field(default_factory=tuple)

    @property
    def exit_code(self):
        return 0 if self.holds else 1

    def render(self):
        lines = [f"principle {self.principle}", f"instance {self.instance}"]
        lines += list(self.log)
        lines.append(f"verdict {'holds' if self.holds else 'fails'}")
        if self.witness is not None:
            lines.append("witness " + ",".join(self.witness.sorted_members))
        else:
            lines.append(f"exhausted {self.filters_checked} filters")
        return "\n".join(lines)


# -- traces and the basic checkers --------------------------------------------------


def trace(g, dsets):
    """Indices of the sets the filter meets."""
    out = set()
    for i, d in enumerate(dsets):
        members = frozenset(getattr(d, "members", d))
        if g.members & members:
            out.add(i)
    return frozenset(out)


def _normalize_sets(P, dsets, require):
    out = []
    for i, d in enumerate(dsets):
        members = frozenset(getattr(d, "members", d))
        c = classify(P, members)
        if require == "dense" and not c.dense:
            raise PrincipleError(f"set {i} is not dense: {sorted(members)}")
        if require == "predense" and not c.predense:
            raise PrincipleError(f"set {i} is not predense: {sorted(members)}")
        out.append(c)
    return out


def check_FA(P, dsets, L, require="dense"):
    """Is there a filter whose trace through the sets is accepted?"""
    sets = _normalize_sets(P, dsets, require)
    k = len(sets)
    if k <= 10 and not check_monotone(L, k):
        raise PrincipleError(f"{L.name} is not monotone at k={k}")
    checked = 0
    for g in enumerate_filters(P):
        checked += 1
        if L.accepts(trace(g, sets), k):
            return PrincipleReport(
                principle=f"FA[{L.name}]",
                instance=f"{P.label}, {k} sets",
                holds=True,
                witness=g,
                filters_checked=checked,
            )
    return PrincipleReport(
        principle=f"FA[{L.name}]",
        instance=f"{P.label}, {k} sets",
        holds=False,
        filters_checked=checked,
    )


def check_N(P, s, value, max_rank=None, small=None, bounded=None):
    """Is there a filter interpreting the name as the (forced) ground value?"""
    if max_rank is not None and rank(s) > max_rank:
        raise PrincipleError(f"name has rank {rank(s)} > cap {max_rank}")
    if small is not None and not is_kappa_small(s, small):
        raise PrincipleError(f"name is not {small}-small")
    if bounded is not None and not is_lambda_bounded(s, bounded):
        raise PrincipleError(f"name is not {bounded}-bounded")
    hypothesis = Eq(Var("s"), Lit(value))
    if not forces(P, P.top, hypothesis, {"s": s}):
        raise PrincipleError("hypothesis fails: the top does not force name = value")
    checked = 0
    for g in enumerate_filters(P):
        checked += 1
        if interpret(s, g) == value:
            return PrincipleReport(
                principle="N",
                instance=f"{P.label}",
                holds=True,
                witness=g,
                filters_checked=checked,
            )
    return PrincipleReport(
        principle="N", instance=f"{P.label}", holds=False, filters_checked=checked
    )


def check_phi_N(P, s, f, L):
    """Forced Sigma_0 fact about the name, largeness of its interpretation.

    The hypothesis is that the top forces f(s); the verdict asks for a filter
    whose interpretation of s is accepted by the ground predicate.
    """
    if s.is_leaf or not is_rank1_over_base(s):
        raise PrincipleError("the special principles need set-shaped rank <= 1 names")
    fv = sorted(free_vars(f))
    if len(fv) != 1:
        raise PrincipleError(f"formula must have exactly one free variable, got {fv}")
    var = fv[0]
    if not forces(P, P.top, f, {var: s}):
        raise PrincipleError("hypothesis fails: the top does not force the formula")
    base = name_base(s)
    k = len(base)
    checked = 0
    for g in enumerate_filters(P):
        checked += 1
        if L.accepts(interpret(s, g), k):
            return PrincipleReport(
                principle=f"phi-N[{L.name}]",
                instance=f"{P.label}",
                holds=True,
                witness=g,
                filters_checked=checked,
            )
    return PrincipleReport(
        principle=f"phi-N[{L.name}]",
        instance=f"{P.label}",
        holds=False,
        filters_checked=checked,
    )


def check_simultaneous_N(P, env, depth=2, formulas=None):
    """One filter satisfying every forced formula from the canonical family."""
    from .semantics import canonical_formulas

    env = dict(env)
    base = frozenset().union(*(name_base(n) for n in env.values())) or frozenset({0})
    if formulas is None:
        formulas = canonical_formulas(
            tuple(sorted(env)), tuple(sorted(base)), max_depth=depth
        )
    forced = [f for f in formulas if forces(P, P.top, f, env)]
    checked = 0
    for g in enumerate_filters(P):
        checked += 1
        ground = {v: interpret(n, g) for v, n in env.items()}
        if all(eval_ground(f, ground) for f in forced):
            return PrincipleReport(
                principle="sim-N",
                instance=f"{P.label}, depth {depth}",
                holds=True,
                witness=g,
                filters_checked=checked,
                log=(f"forced formulas: {len(forced)} of {len(formulas)}",),
            )
    return PrincipleReport(
        principle="sim-N",
        instance=f"{P.label}, depth {depth}",
        holds=False,
        filters_checked=checked,
        log=(f"forced formulas: {len(forced)} of {len(formulas)}",),
    )


# -- the split/cone transfer pipeline --------------------------------------------------


def _forces_largeness(P, p, s, L, k):
    """p forces the interpretation to be accepted: true in every generic through p."""
    for G in generic_filters(P):
        if p in G.members and not L.accepts(interpret(s, G), k):
            return False
    return True


def hamkins_pipeline(P, s, L, m=None):
    """Transfer a largeness principle from an m-bounded name to 1-bounded cones.

    Replays the split construction: the name splits into m many 1-bounded
    parts; densely many conditions decide an accepted part; the part
    restricted to each such cone admits a correctly-interpreting filter;
    regenerating that filter in the whole poset carries the witness back.
    """
    if not is_well_met(P):
        raise PrincipleError(f"{P.label} is not well-met")
    if s.is_leaf or not is_rank1_over_base(s):
        raise PrincipleError("pipeline needs a set-shaped rank <= 1 name")
    if m is None:
        m = max(
            (len([q for c, q in s.entries if c == kid]) for kid in {c for c, _ in s.entries}),
            default=1,
        )
    if not is_lambda_bounded(s, m):
        raise PrincipleError(f"name is not {m}-bounded")
    base = name_base(s)
    k = len(base)
    if not check_monotone(L, max(k, 1)):
        raise PrincipleError(f"{L.name} is not monotone")
    if not is_partition_regular(L, k, max(m, 1)):
        raise PrincipleError(
            f"{L.name} is not partition-regular for k={k}, parts={m}"
        )
    if not _forces_largeness(P, P.top, s, L, k):
        raise PrincipleError("hypothesis fails: the top does not force largeness")
    log = [f"split into {m} one-bounded parts"]
    parts = split_bounded(s, m)
    deciders = []
    for p in P.elements:
        for delta, part in enumerate(parts):
            if _forces_largeness(P, p, part, L, k):
                deciders.append((p, delta))
                break
    decider_set = frozenset(p for p, _ in deciders)
    if not classify(P, decider_set).dense:
        return PrincipleReport(
            principle=f"hamkins[{L.name}]",
            instance=f"{P.label}, m={m}",
            holds=False,
            log=tuple(log + ["deciding conditions are not dense"]),
        )
    log.append(f"deciding conditions: {sorted(decider_set)}")
    witness = None
    for p, delta in deciders:
        restricted = restrict_to_cone(P, parts[delta], p)
        C = cone(P, p)
        for G in generic_filters(C):
            if not L.accepts(interpret(restricted, G), k):
                return PrincipleReport(
                    principle=f"hamkins[{L.name}]",
                    instance=f"{P.label}, m={m}",
                    holds=False,
                    log=tuple(
                        log + [f"cone at {p} fails to force largeness of part {delta}"]
                    ),
                )
        cone_witness = None
        for g in enumerate_filters(C):
            if L.accepts(interpret(restricted, g), k):
                cone_witness = g
                break
        if cone_witness is None:
            return PrincipleReport(
                principle=f"hamkins[{L.name}]",
                instance=f"{P.label}, m={m}",
                holds=False,
                log=tuple(log + [f"no one-bounded witness on the cone at {p}"]),
            )
        h = generated_filter(P, cone_witness.members)
        if not L.accepts(interpret(s, h), k):
            return PrincipleReport(
                principle=f"hamkins[{L.name}]",
                instance=f"{P.label}, m={m}",
                holds=False,
                log=tuple(log + [f"regenerated filter at {p} loses largeness"]),
            )
        log.append(
            f"cone {p}: part {delta}, witness "
            + ",".join(cone_witness.sorted_members)
            + " regenerates to "
            + ",".join(h.sorted_members)
        )
        if witness is None:
            witness = h
    return PrincipleReport(
        principle=f"hamkins[{L.name}]",
        instance=f"{P.label}, m={m}",
        holds=True,
        witness=witness,
        log=tuple(log),
    )


# -- independent witness verification ----------------------------------------------------


def verify_witness(report, P, dsets=None, L=None, s=None, value=None):
    """Re-check a holding report's witness by direct evaluation."""
    if not report.holds or report.witness is None:
        return not report.holds
    g = report.witness
    if dsets is not None:
        k = len(dsets)
        return L.accepts(trace(g, dsets), k)
    if value is not None:
        return interpret(s, g) == value
    if L is not None and s is not None:
        return L.accepts(interpret(s, g), len(name_base(s)))
    raise ValueError("nothing to verify against")
