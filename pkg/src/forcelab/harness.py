"""Instance enumeration and the exhaustive property suites.

The suites execute the invariants of every module over a configurable
space of small instances: posets up to isomorphism, names within rank /
entry / weight caps, and the canonical formula family. Probe suites report
findings (expected divergences) without failing the run; counterexamples
serialize into replayable bundles.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from functools import lru_cache

from .boolcomp import complete, ultrafilters
from .names import (
    check_name,
    children,
    enumerate_names,
    hf_repr,
    interpret,
    is_lambda_bounded,
    is_rank1_over_base,
    make_name,
    name_base,
    name_to_dsl,
    parse_hf,
    parse_names,
    quasi_interpret,
    rank,
)
from .order import (
    FIXTURES,
    classify,
    enumerate_filters,
    generic_filters,
    is_separative,
    is_well_met,
    make_poset,
    parse_poset,
    poset_dsl,
    Filter,
)
from .principles import (
    AT_LEAST,
    ALL,
    CONTAINS,
    NONEMPTY,
    PrincipleError,
    check_FA,
    check_N,
    is_partition_regular,
    hamkins_pipeline,
    trace,
)
from .semantics import (
    Eq,
    Lit,
    Var,
    boolean_value,
    canonical_formulas,
    eval_ground,
    forces,
    forces_all_generics,
    formula_to_text,
    parse_formula,
    strongly_forces,
)
from .synth import (
    encode_family_as_name,
    family_check_equality,
    family_for_formula,
    family_for_formula_bounded,
    family_guarantee_violations,
    family_interp_agreement,
    meets_all,
    recover_family,
    SynthError,
)
from .ultrapower import (
    UniverseSpec,
    build_quotient,
    check_elementarity,
    check_los,
    check_trace_identity,
    embedding_j,
)


# -- poset enumeration up to isomorphism ------------------------------------------


_LETTERS = "abcdefghijklmnopqrstuvwxyz"


@lru_cache(maxsize=None)
def enumerate_posets(k):
    """All posets with a top element on exactly k points, one per iso class.

    A poset with top on k points is an arbitrary poset on the k-1 points
    below the top; those are enumerated by orienting each unordered pair
    (or leaving it incomparable), keeping the transitive assignments, and
    deduplicating by a minimum-over-permutations canonical matrix.
    """
    if k < 1:
        raise ValueError("poset size must be >= 1")
    if k > 6:
        raise ValueError("poset enumeration is capped at 6 points")
    m = k - 1
    idx = list(range(m))
    pairs = list(itertools.combinations(idx, 2))
    canon_seen = {}
    for assignment in itertools.product((0, 1, 2), repeat=len(pairs)):
        rel = set()
        for (a, b), code in zip(pairs, assignment):
            if code == 1:
                rel.add((a, b))
            elif code == 2:
                rel.add((b, a))
        ok = True
        for (a, b) in rel:
            for (c, d) in rel:
                if b == c and (a, d) not in rel and a != d:
                    ok = False
                    break
            if not ok:
                break
        if not ok:
            continue
        canon = min(
            tuple(sorted((perm[a], perm[b]) for (a, b) in rel))
            for perm in itertools.permutations(idx)
        )
        if canon not in canon_seen:
            canon_seen[canon] = canon
    out = []
    for i, rel in enumerate(sorted(canon_seen)):
        elems = ["1"] + [_LETTERS[j] for j in range(m)]
        covers = [(_LETTERS[j], "1") for j in range(m)]
        covers += [(_LETTERS[a], _LETTERS[b]) for (a, b) in rel]
        out.append(make_poset(elems, covers, top="1", label=f"P{k}n{i}"))
    return tuple(out)


# -- instance space -----------------------------------------------------------------


@dataclass(frozen=True)
class InstanceSpace:
    """Caps defining the exhaustive instance space.

    Exhaustive mode ignores the seed; it is reserved for sampled extensions.
    """

    max_poset: int = 4
    name_rank: int = 2
    name_entries: int = 2
    name_weight: int = 2
    base: tuple = (0, 1)
    formula_depth: int = 3
    include_fixtures: bool = True
    seed: int = 0

    def __post_init__(self):
        if self.max_poset > 6:
            raise ValueError("poset cap exceeds the supported limit of 6")
        if self.name_rank > 3:
            raise ValueError("name rank cap exceeds the supported limit of 3")

    def posets(self):
        out = []
        for k in range(1, self.max_poset + 1):
            out.extend(enumerate_posets(k))
        if self.include_fixtures:
            out.extend(
                P for P in FIXTURES.values() if len(P.elements) <= self.max_poset
            )
        return tuple(out)

    def names(self, P, **overrides):
        kwargs = dict(
            max_rank=self.name_rank,
            max_entries=self.name_entries,
            max_weight=self.name_weight,
            base=self.base,
        )
        kwargs.update(overrides)
        return enumerate_names(P, **kwargs)

    def formulas(self, variables, depth=None):
        return canonical_formulas(
            tuple(variables), tuple(self.base), depth or self.formula_depth
        )

    def algebras(self):
        """Completions of the poset space, one per atom count."""
        seen = {}
        for P in self.posets():
            B = complete(P)
            seen.setdefault(len(B.atoms), B)
        return tuple(seen[a] for a in sorted(seen))


# -- results -----------------------------------------------------------------------


@dataclass
class PropertyResult:
    suite: str
    pid: str
    instances: int = 0
    failures: int = 0
    probe: bool = False
    elapsed: float = 0.0
    counterexamples: list = field(default_factory=list)
    findings: list = field(default_factory=list)

    @property
    def ok(self):
        return self.probe or self.failures == 0

    def line(self):
        return "\t".join(
            [
                self.suite,
                self.pid,
                str(self.instances),
                str(self.failures),
                "probe" if self.probe else "check",
                f"{self.elapsed:.2f}",
            ]
        )


@dataclass
class SuiteReport:
    results: list

    @property
    def exit_code(self):
        return 0 if all(r.ok for r in self.results) else 1

    def lines(self):
        return [r.line() for r in self.results]

    def render(self):
        out = []
        for r in self.results:
            status = "PASS" if r.ok else "FAIL"
            kind = " (probe)" if r.probe else ""
            out.append(
                f"[{status}] {r.suite}/{r.pid}{kind}: "
                f"{r.instances} instances, {r.failures} failures, {r.elapsed:.2f}s"
            )
            for finding in r.findings[:8]:
                out.append(f"    finding: {finding}")
            for ce in r.counterexamples[:3]:
                out.append(f"    counterexample: {ce}")
        return "\n".join(out)


# -- property framework ---------------------------------------------------------------


class Property:
    """One machine-checked law: enumerate instances, check each, bundle failures."""

    suite = "misc"
    pid = "unnamed"
    probe = False

    def instances(self, space):
        raise NotImplementedError

    def check(self, instance):
        """Return None when fine, or a serializable violation payload."""
        raise NotImplementedError

    def run(self, space):
        result = PropertyResult(self.suite, self.pid, probe=self.probe)
        start = time.perf_counter()
        for instance in self.instances(space):
            result.instances += 1
            payload = self.check(instance)
            if payload is not None:
                result.failures += 1
                bundle = {"suite": self.suite, "property": self.pid, **payload}
                if self.probe:
                    result.findings.append(payload.get("finding", str(payload)))
                result.counterexamples.append(bundle)
        result.elapsed = time.perf_counter() - start
        return result

    def replay(self, bundle):
        """Re-run the bundled instance; must reproduce the same payload."""
        instance = self.deserialize(bundle)
        return self.check(instance)

    def deserialize(self, bundle):
        raise NotImplementedError


@lru_cache(maxsize=None)
def _parse_poset_cached(text):
    return parse_poset(text)


def _poset_payload(P):
    return {"poset": poset_dsl(P)}


def _names_payload(P, env):
    return "\n".join(
        f"name {v} = {name_to_dsl(nm, P.top)};" for v, nm in sorted(env.items())
    )


# -- strong forcing suite ----------------------------------------------------------------


def _name_pool(space, P):
    return space.names(P)


def _small_pool(space, P):
    return space.names(P, max_weight=1)


class StrongForcingImpliesForcing(Property):
    suite = "sforcing"
    pid = "strong-forcing-implies-forcing"

    def instances(self, space):
        for P in space.posets():
            for s in _name_pool(space, P):
                yield (P, s)

    def check(self, instance):
        P, s = instance
        for t in children(s):
            for p in P.elements:
                if strongly_forces(P, p, t, s):
                    from .semantics import Mem

                    if not forces(P, p, Mem(Var("t"), Var("s")), {"t": t, "s": s}):
                        return {
                            "poset": poset_dsl(P),
                            "names": _names_payload(P, {"s": s, "t": t}),
                            "at": p,
                        }
        return None

    def deserialize(self, bundle):
        P = _parse_poset_cached(bundle["poset"])
        env = parse_names(bundle["names"], P)
        return (P, env["s"])


class ForcedMembershipHasDenseStrongWitnesses(Property):
    suite = "sforcing"
    pid = "forced-membership-has-dense-strong-witnesses"

    def instances(self, space):
        for P in space.posets():
            pool = _name_pool(space, P)
            small = _small_pool(space, P)
            for s in pool:
                yield (P, s, small)

    def check(self, instance):
        from .semantics import Mem, Eq as EqNode

        P, s, taus = instance
        kids = children(s)
        for t in taus:
            for p in P.elements:
                if not forces(P, p, Mem(Var("t"), Var("s")), {"t": t, "s": s}):
                    continue
                for q in P.below(p):
                    good = any(
                        forces(P, r, EqNode(Var("a"), Var("b")), {"a": kid, "b": t})
                        and strongly_forces(P, r, kid, s)
                        for r in P.below(q)
                        for kid in kids
                    )
                    if not good:
                        return {
                            "poset": poset_dsl(P),
                            "names": _names_payload(P, {"s": s, "t": t}),
                            "at": p,
                            "below": q,
                        }
        return None

    def deserialize(self, bundle):
        P = _parse_poset_cached(bundle["poset"])
        env = parse_names(bundle["names"], P)
        return (P, env["s"], (env["t"],))


class StrongForcingTransfersToInterpretation(Property):
    suite = "sforcing"
    pid = "strong-forcing-transfers-to-interpretation"

    def instances(self, space):
        for P in space.posets():
            for s in _name_pool(space, P):
                yield (P, s)

    def check(self, instance):
        P, s = instance
        for g in enumerate_filters(P):
            for t in children(s):
                if any(strongly_forces(P, p, t, s) for p in g.members):
                    if interpret(t, g) not in interpret(s, g):
                        return {
                            "poset": poset_dsl(P),
                            "names": _names_payload(P, {"s": s, "t": t}),
                            "filter": list(g.sorted_members),
                        }
        return None

    def deserialize(self, bundle):
        P = _parse_poset_cached(bundle["poset"])
        env = parse_names(bundle["names"], P)
        return (P, env["s"])


class ExclusionClause(Property):
    suite = "sforcing"
    pid = "exclusion-clause"

    def instances(self, space):
        for P in space.posets():
            pool = _name_pool(space, P)
            small = _small_pool(space, P)
            for s in pool:
                yield (P, s, small)

    def check(self, instance):
        from .semantics import Mem, Not

        P, s, taus = instance
        entries = () if s.is_leaf else s.entries
        for g in enumerate_filters(P):
            interp_s = interpret(s, g)
            for t in taus:
                it = interpret(t, g)
                for p in g.members:
                    hypothesis = all(
                        it != interpret(kid, g)
                        or forces(P, p, Not(Mem(Var("c"), Var("s"))), {"c": kid, "s": s})
                        for kid, _ in entries
                    )
                    if hypothesis and not s.is_leaf and it in interp_s:
                        return {
                            "poset": poset_dsl(P),
                            "names": _names_payload(P, {"s": s, "t": t}),
                            "filter": list(g.sorted_members),
                            "at": p,
                        }
        return None

    def deserialize(self, bundle):
        P = _parse_poset_cached(bundle["poset"])
        env = parse_names(bundle["names"], P)
        return (P, env["s"], (env["t"],))


# -- semantics cross-check suite -------------------------------------------------------------


def _crosscheck_envs(space, P):
    pool = _name_pool(space, P)
    for s in pool:
        yield {"s": s}
    for s, t in zip(pool, pool[1:]):
        yield {"s": s, "t": t}


@lru_cache(maxsize=None)
def _ground_truth(f, ground_items):
    return eval_ground(f, dict(ground_items))


class DecidersAgree(Property):
    suite = "crosscheck"
    pid = "deciders-agree"

    def instances(self, space):
        for P in space.posets():
            for env in _crosscheck_envs(space, P):
                yield (P, env, space)

    def check(self, instance):
        from .semantics import boolean_value_mask, forcing_masks

        P, env, space = instance
        generics = generic_filters(P)
        grounds = [
            tuple(sorted((v, interpret(n, G)) for v, n in env.items()))
            for G in generics
        ]
        env_items = tuple(sorted(env.items()))
        one, embm = forcing_masks(P)
        formulas = space.formulas(tuple(sorted(env)))
        for f in formulas:
            mask = boolean_value_mask(P, f, env_items)
            truths = [_ground_truth(f, ground) for ground in grounds]
            for p in P.elements:
                via_value = embm[p] & ~mask == 0
                via_generics = all(
                    t for G, t in zip(generics, truths) if p in G.members
                )
                if via_value != via_generics:
                    return {
                        "poset": poset_dsl(P),
                        "names": _names_payload(P, env),
                        "formula": formula_to_text(f),
                        "at": p,
                        "boolean-value": via_value,
                        "generics": via_generics,
                    }
        return None

    def deserialize(self, bundle):
        P = _parse_poset_cached(bundle["poset"])
        env = parse_names(bundle["names"], P)
        space = InstanceSpace()
        return (P, env, space)


class BooleanValueIsSupOfForcers(Property):
    suite = "crosscheck"
    pid = "boolean-value-is-sup-of-forcers"

    def instances(self, space):
        for P in space.posets():
            for env in _crosscheck_envs(space, P):
                yield (P, env, space)

    def check(self, instance):
        from .semantics import boolean_value_mask, forcing_masks

        P, env, space = instance
        env_items = tuple(sorted(env.items()))
        one, embm = forcing_masks(P)
        for f in space.formulas(tuple(sorted(env)), depth=2):
            mask = boolean_value_mask(P, f, env_items)
            sup = 0
            for p in P.elements:
                if embm[p] & ~mask == 0:
                    sup |= embm[p]
            if mask != sup:
                return {
                    "poset": poset_dsl(P),
                    "names": _names_payload(P, env),
                    "formula": formula_to_text(f),
                }
        return None

    def deserialize(self, bundle):
        P = _parse_poset_cached(bundle["poset"])
        env = parse_names(bundle["names"], P)
        return (P, env, InstanceSpace())


# -- correspondence suite ----------------------------------------------------------------------


class EqualityFamilyGuarantee(Property):
    suite = "correspondence"
    pid = "equality-family-guarantee"

    def instances(self, space):
        for P in space.posets():
            for s in _name_pool(space, P):
                values = sorted(
                    {interpret(s, G) for G in generic_filters(P)},
                    key=lambda v: hf_repr(v),
                )
                for v in values:
                    yield (P, s, v)

    def check(self, instance):
        P, s, value = instance
        fam = family_check_equality(P, s, value)
        bad = family_guarantee_violations(
            P, Eq(Var("s"), Lit(value)), {"s": s}, fam
        )
        if bad:
            return {
                "poset": poset_dsl(P),
                "names": _names_payload(P, {"s": s}),
                "value": hf_repr(value),
                "filter": list(bad[0].sorted_members),
            }
        return None

    def deserialize(self, bundle):
        P = _parse_poset_cached(bundle["poset"])
        env = parse_names(bundle["names"], P)
        return (P, env["s"], parse_hf(bundle["value"]))


class FormulaFamilyGuarantee(Property):
    suite = "correspondence"
    pid = "formula-family-guarantee"

    def instances(self, space):
        for P in space.posets():
            pool = _small_pool(space, P)
            envs = [{"s": s} for s in pool]
            envs += [{"s": s, "t": t} for s, t in zip(pool, pool[1:])]
            for env in envs:
                yield (P, env, space)

    def check(self, instance):
        P, env, space = instance
        for f in space.formulas(tuple(sorted(env)), depth=2):
            fam = family_for_formula(P, f, env)
            bad = family_guarantee_violations(P, f, env, fam)
            if bad:
                return {
                    "poset": poset_dsl(P),
                    "names": _names_payload(P, env),
                    "formula": formula_to_text(f),
                    "filter": list(bad[0].sorted_members),
                }
        return None

    def deserialize(self, bundle):
        P = _parse_poset_cached(bundle["poset"])
        env = parse_names(bundle["names"], P)
        return (P, env, InstanceSpace())


class FaNameRoundTrip(Property):
    suite = "correspondence"
    pid = "fa-name-principle-round-trip"

    def instances(self, space):
        for P in space.posets():
            dense_sets = _all_dense_sets(P)
            families = [(d,) for d in dense_sets]
            families += list(zip(dense_sets, dense_sets[1:]))
            for dsets in families:
                yield (P, tuple(dsets))

    def check(self, instance):
        P, dsets = instance
        values = [frozenset(range(i)) for i in range(len(dsets))]
        sigma = encode_family_as_name(P, dsets, values)
        A = frozenset(values)
        fa = check_FA(P, dsets, ALL)
        n = check_N(P, sigma, A)
        problems = []
        if fa.holds != n.holds:
            problems.append("verdicts differ")
        if fa.holds:
            if interpret(sigma, fa.witness) != A:
                problems.append("FA witness fails the name")
            if trace(n.witness, dsets) != frozenset(range(len(dsets))):
                problems.append("name witness misses a set")
        recovered = recover_family(P, sigma, values)
        for d, r in zip(dsets, recovered):
            if not (frozenset(d) <= r):
                problems.append("recovered family lost conditions")
        down = [
            frozenset(p for p in P.elements if any(P.leq(p, q) for q in d))
            for d in dsets
        ]
        if [set(r) for r in recovered] != [set(d) for d in down]:
            problems.append("recovery differs from downward closure")
        if problems:
            return {
                "poset": poset_dsl(P),
                "sets": [sorted(d) for d in dsets],
                "problems": problems,
            }
        return None

    def deserialize(self, bundle):
        P = _parse_poset_cached(bundle["poset"])
        return (P, tuple(frozenset(d) for d in bundle["sets"]))


@lru_cache(maxsize=None)
def _all_dense_sets(P):
    """Every dense subset of P, smallest first (deduped upward closures)."""
    out = []
    elems = P.elements
    for r in range(1, len(elems) + 1):
        for combo in itertools.combinations(elems, r):
            S = frozenset(combo)
            if classify(P, S).dense:
                out.append(S)
    out.sort(key=lambda s: (len(s), tuple(sorted(s))))
    return tuple(out)


# -- bounded suite -----------------------------------------------------------------------------


class BoundedFamilyGuarantee(Property):
    suite = "bounded"
    pid = "bounded-family-guarantee"

    def instances(self, space):
        for B in space.algebras():
            PB = B.as_poset()
            pool_conditions = sorted(
                {B.element_id(frozenset({a})) for a in B.atoms} | {PB.top}
            )
            for m in (1, 2):
                pool = enumerate_names(
                    PB,
                    max_rank=space.name_rank,
                    max_entries=space.name_entries,
                    max_weight=space.name_weight,
                    base=space.base,
                    bound=m,
                    conditions=pool_conditions,
                )
                for s in pool:
                    yield (B, s, m, space)

    def check(self, instance):
        B, s, m, space = instance
        PB = B.as_poset()
        for f in space.formulas(("s",), depth=2):
            try:
                fam = family_for_formula_bounded(B, f, {"s": s}, m)
            except SynthError as exc:
                return {
                    "poset": poset_dsl(PB),
                    "names": _names_payload(PB, {"s": s}),
                    "formula": formula_to_text(f),
                    "error": str(exc),
                }
            for cs, bound in zip(fam.sets, fam.bounds):
                if not cs.predense or (bound is not None and len(cs.members) > bound):
                    return {
                        "poset": poset_dsl(PB),
                        "names": _names_payload(PB, {"s": s}),
                        "formula": formula_to_text(f),
                        "set": sorted(cs.members),
                    }
            bad = family_guarantee_violations(PB, f, {"s": s}, fam)
            if bad:
                return {
                    "poset": poset_dsl(PB),
                    "names": _names_payload(PB, {"s": s}),
                    "formula": formula_to_text(f),
                    "filter": list(bad[0].sorted_members),
                }
        return None

    def deserialize(self, bundle):
        PB = _parse_poset_cached(bundle["poset"])
        B = complete(PB)
        env = parse_names(PB and bundle["names"], PB)
        return (B, env["s"], 2, InstanceSpace())


# -- interpretation agreement suite ------------------------------------------------------------


class AgreementFamilyGuarantee(Property):
    suite = "interp-agreement"
    pid = "agreement-family-guarantee"

    def instances(self, space):
        for P in space.posets():
            for s in space.names(P, max_rank=1):
                if is_rank1_over_base(s) and not s.is_leaf:
                    yield (P, s)

    def check(self, instance):
        P, s = instance
        fam = family_interp_agreement(P, s)
        base = name_base(s)
        for g in enumerate_filters(P):
            if meets_all(g, fam):
                if interpret(s, g) != quasi_interpret(s, g, base=base):
                    return {
                        "poset": poset_dsl(P),
                        "names": _names_payload(P, {"s": s}),
                        "filter": list(g.sorted_members),
                    }
        return None

    def deserialize(self, bundle):
        P = _parse_poset_cached(bundle["poset"])
        env = parse_names(bundle["names"], P)
        return (P, env["s"])


class SeparativeAgreement(Property):
    suite = "interp-agreement"
    pid = "separative-one-bounded-agreement"

    def instances(self, space):
        for P in space.posets():
            if is_separative(P):
                for s in space.names(P, max_rank=1, bound=1):
                    if is_rank1_over_base(s) and not s.is_leaf:
                        yield (P, s)

    def check(self, instance):
        P, s = instance
        base = name_base(s)
        for g in enumerate_filters(P):
            if interpret(s, g) != quasi_interpret(s, g, base=base):
                return {
                    "poset": poset_dsl(P),
                    "names": _names_payload(P, {"s": s}),
                    "filter": list(g.sorted_members),
                }
        return None

    def deserialize(self, bundle):
        P = _parse_poset_cached(bundle["poset"])
        env = parse_names(bundle["names"], P)
        return (P, env["s"])


class SeparativityProbe(Property):
    suite = "interp-agreement"
    pid = "separativity-probe"
    probe = True

    def instances(self, space):
        for P in space.posets():
            if not is_separative(P):
                for s in space.names(P, max_rank=1, bound=1):
                    if is_rank1_over_base(s) and not s.is_leaf:
                        yield (P, s)

    def check(self, instance):
        P, s = instance
        base = name_base(s)
        for g in enumerate_filters(P):
            left = interpret(s, g)
            right = quasi_interpret(s, g, base=base)
            if left != right:
                return {
                    "poset": poset_dsl(P),
                    "names": _names_payload(P, {"s": s}),
                    "filter": list(g.sorted_members),
                    "finding": (
                        f"{P.label}: {name_to_dsl(s, P.top)} under "
                        f"{{{','.join(g.sorted_members)}}}: "
                        f"interpretation {hf_repr(left)} vs "
                        f"quasi-interpretation {hf_repr(right)}"
                    ),
                }
        return None

    def deserialize(self, bundle):
        P = _parse_poset_cached(bundle["poset"])
        env = parse_names(bundle["names"], P)
        return (P, env["s"])


# -- split/cone transfer suite ------------------------------------------------------------------


class SplitConeTransfer(Property):
    suite = "hamkins"
    pid = "split-cone-transfer"

    PREDICATES = (NONEMPTY, AT_LEAST(1), CONTAINS({0}))

    def instances(self, space):
        for P in space.posets():
            if not is_well_met(P):
                continue
            for m in (1, 2):
                pool = space.names(P, max_rank=1, bound=m)
                for s in pool:
                    if s.is_leaf or not is_rank1_over_base(s):
                        continue
                    for L in self.PREDICATES:
                        k = len(name_base(s))
                        if not is_partition_regular(L, k, m):
                            continue
                        if all(
                            L.accepts(interpret(s, G), k) for G in generic_filters(P)
                        ):
                            yield (P, s, L, m)

    def check(self, instance):
        P, s, L, m = instance
        try:
            report = hamkins_pipeline(P, s, L, m=m)
        except PrincipleError as exc:
            return {
                "poset": poset_dsl(P),
                "names": _names_payload(P, {"s": s}),
                "largeness": L.name,
                "m": m,
                "error": str(exc),
            }
        if not report.holds:
            return {
                "poset": poset_dsl(P),
                "names": _names_payload(P, {"s": s}),
                "largeness": L.name,
                "m": m,
                "log": list(report.log),
            }
        return None

    def deserialize(self, bundle):
        from .principles import parse_largeness

        P = _parse_poset_cached(bundle["poset"])
        env = parse_names(bundle["names"], P)
        return (P, env["s"], parse_largeness(bundle["largeness"]), bundle["m"])


# -- ultrapower suite ---------------------------------------------------------------------------


class LosAgreement(Property):
    suite = "ultrapower"
    pid = "los-agreement"

    def instances(self, space):
        for B in space.algebras():
            for U in ultrafilters(B):
                M = build_quotient(B, U, UniverseSpec(base=tuple(space.base)))
                yield (M, space)

    def check(self, instance):
        M, space = instance
        pool = M.names
        envs = [{"s": s} for s in pool]
        envs += [{"s": s, "t": t} for s, t in zip(pool, pool[1:])]
        for env in envs:
            for f in space.formulas(tuple(sorted(env))):
                if not check_los(M, f, env):
                    PB = M.forcing
                    return {
                        "poset": poset_dsl(PB),
                        "atom": M.atom,
                        "names": _names_payload(PB, env),
                        "formula": formula_to_text(f),
                    }
        return None

    def deserialize(self, bundle):
        PB = _parse_poset_cached(bundle["poset"])
        B = complete(PB)
        from .boolcomp import ultrafilter_at

        M = build_quotient(B, ultrafilter_at(B, bundle["atom"]))
        return (M, InstanceSpace())


class TraceIdentity(Property):
    suite = "ultrapower"
    pid = "trace-identity"

    def instances(self, space):
        for B in space.algebras():
            for U in ultrafilters(B):
                M = build_quotient(B, U, UniverseSpec(base=tuple(space.base)))
                for s in M.names:
                    if rank(s) <= 1 and is_rank1_over_base(s):
                        yield (M, s)

    def check(self, instance):
        M, s = instance
        if not check_trace_identity(M, s):
            return {
                "poset": poset_dsl(M.forcing),
                "atom": M.atom,
                "names": _names_payload(M.forcing, {"s": s}),
            }
        return None

    def deserialize(self, bundle):
        PB = _parse_poset_cached(bundle["poset"])
        from .boolcomp import ultrafilter_at

        B = complete(PB)
        M = build_quotient(B, ultrafilter_at(B, bundle["atom"]))
        env = parse_names(bundle["names"], PB)
        return (M, env["s"])


class EmbeddingElementary(Property):
    suite = "ultrapower"
    pid = "embedding-elementary"

    def instances(self, space):
        ground = frozenset(space.base)
        for B in space.algebras():
            for U in ultrafilters(B):
                M = build_quotient(B, U, UniverseSpec(base=tuple(space.base)))
                sample = [
                    s
                    for s in M.names
                    if rank(s) <= 1 and is_rank1_over_base(s)
                ]
                step = max(1, len(sample) // 6)
                for s in sample[::step]:
                    yield (M, ground, s)

    def check(self, instance):
        M, ground, s = instance
        if not check_elementarity(M, ground, s, depth=3):
            return {
                "poset": poset_dsl(M.forcing),
                "atom": M.atom,
                "names": _names_payload(M.forcing, {"s": s}),
                "ground": hf_repr(ground),
            }
        return None

    def deserialize(self, bundle):
        PB = _parse_poset_cached(bundle["poset"])
        from .boolcomp import ultrafilter_at

        B = complete(PB)
        M = build_quotient(B, ultrafilter_at(B, bundle["atom"]))
        env = parse_names(bundle["names"], PB)
        return (M, parse_hf(bundle["ground"]), env["s"])


class UltrafiltersAreGeneric(Property):
    suite = "ultrapower"
    pid = "ultrafilters-generic"

    def instances(self, space):
        for B in space.algebras():
            yield (B,)

    def check(self, instance):
        (B,) = instance
        PB = B.as_poset()
        us = ultrafilters(B)
        if len(B.atoms) <= 3:
            sets = [
                frozenset(c)
                for r in range(1, len(PB.elements) + 1)
                for c in itertools.combinations(PB.elements, r)
                if classify(PB, frozenset(c)).predense
            ]
        else:
            sets = [
                frozenset(B.element_id(frozenset(block)) for block in partition)
                for partition in _atom_partitions(sorted(B.atoms))
            ]
        for U in us:
            for S in sets:
                if not (U.members & S):
                    return {"poset": poset_dsl(PB), "set": sorted(S)}
        return None

    def deserialize(self, bundle):
        PB = _parse_poset_cached(bundle["poset"])
        return (complete(PB),)


def _atom_partitions(atoms):
    if not atoms:
        yield []
        return
    first, rest = atoms[0], atoms[1:]
    for part in _atom_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1 :]
        yield [[first]] + part


# -- triviality suite ----------------------------------------------------------------------------


class DenseFaAlwaysHolds(Property):
    suite = "triviality"
    pid = "dense-fa-always-holds"

    def instances(self, space):
        for P in space.posets():
            yield (P,)

    def check(self, instance):
        (P,) = instance
        dsets = _all_dense_sets(P)
        report = check_FA(P, dsets, ALL)
        if not report.holds:
            return {"poset": poset_dsl(P), "sets": [sorted(d) for d in dsets]}
        return None

    def deserialize(self, bundle):
        return (_parse_poset_cached(bundle["poset"]),)


class OneBoundedTriviality(Property):
    suite = "triviality"
    pid = "one-bounded-name-principle-trivial"

    def instances(self, space):
        for P in space.posets():
            for s in space.names(P, max_rank=1, bound=1):
                if s.is_leaf or not is_rank1_over_base(s):
                    continue
                value = interpret(s, generic_filters(P)[0])
                hypothesis = Eq(Var("s"), Lit(value))
                if forces(P, P.top, hypothesis, {"s": s}):
                    yield (P, s, value)

    def check(self, instance):
        P, s, value = instance
        report = check_N(P, s, value)
        if not report.holds:
            return {
                "poset": poset_dsl(P),
                "names": _names_payload(P, {"s": s}),
                "value": hf_repr(value),
            }
        # a generic (atom-respecting) witness always exists
        if not any(interpret(s, G) == value for G in generic_filters(P)):
            return {
                "poset": poset_dsl(P),
                "names": _names_payload(P, {"s": s}),
                "value": hf_repr(value),
                "problem": "no generic witness",
            }
        return None

    def deserialize(self, bundle):
        P = _parse_poset_cached(bundle["poset"])
        env = parse_names(bundle["names"], P)
        return (P, env["s"], parse_hf(bundle["value"]))


# -- registry and runner -------------------------------------------------------------------------


PROPERTIES = [
    StrongForcingImpliesForcing(),
    ForcedMembershipHasDenseStrongWitnesses(),
    StrongForcingTransfersToInterpretation(),
    ExclusionClause(),
    DecidersAgree(),
    BooleanValueIsSupOfForcers(),
    EqualityFamilyGuarantee(),
    FormulaFamilyGuarantee(),
    FaNameRoundTrip(),
    BoundedFamilyGuarantee(),
    AgreementFamilyGuarantee(),
    SeparativeAgreement(),
    SeparativityProbe(),
    SplitConeTransfer(),
    LosAgreement(),
    TraceIdentity(),
    EmbeddingElementary(),
    UltrafiltersAreGeneric(),
    DenseFaAlwaysHolds(),
    OneBoundedTriviality(),
]

SUITES = {}
for prop in PROPERTIES:
    SUITES.setdefault(prop.suite, []).append(prop)

PROPERTY_INDEX = {p.pid: p for p in PROPERTIES}


def run_suite(space, suites=None):
    """Execute the selected suites (all by default) over the space."""
    selected = list(SUITES) if not suites else list(suites)
    results = []
    for suite in selected:
        if suite not in SUITES:
            raise ValueError(f"unknown suite {suite!r} (have: {sorted(SUITES)})")
        for prop in SUITES[suite]:
            results.append(prop.run(space))
    return SuiteReport(results)


def replay(bundle):
    """Re-run a serialized counterexample bundle; returns the fresh payload."""
    pid = bundle["property"]
    prop = PROPERTY_INDEX.get(pid)
    if prop is None:
        raise ValueError(f"unknown property {pid!r}")
    return prop.replay(bundle)
