"""Dense-set families that make filters interpret names correctly.

Each constructor materializes, for a target fact, a finite family of dense
(or predense, in the bounded variant) sets with the guarantee: any filter
that meets every set in the family and contains a condition forcing the
fact makes the fact true of the interpreted names in the ground model.
"Densely many" sets are materialized as maximal witness sets (the full set
of conditions with the property), so families are deterministic and
downward closed.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .boolcomp import complete
from .names import (
    check_name,
    children,
    hf_key,
    hf_repr,
    interpret,
    is_check,
    is_lambda_bounded,
    make_name,
    name_base,
    name_to_dsl,
)
from .order import classify, enumerate_filters
from .semantics import (
    All,
    And,
    Eq,
    Ex,
    Mem,
    Not,
    Or,
    eval_ground,
    forces,
    bval_eq_names,
    bval_mem_names,
    nnf,
    strongly_forces,
)


class SynthError(ValueError):
    pass


@dataclass(frozen=True)
class DenseFamily:
    """Indexed family of classified condition sets with provenance tags.

    `bounds` carries the constructed size bound per set in the predense
    variant (None for the unbounded, dense variant).
    """

    sets: tuple = ()
    provenance: tuple = ()
    bounds: tuple = field(default=None)

    def __post_init__(self):
        if self.bounds is None:
            object.__setattr__(self, "bounds", (None,) * len(self.sets))
        assert len(self.sets) == len(self.provenance) == len(self.bounds)

    def __len__(self):
        return len(self.sets)

    def __iter__(self):
        return iter(self.sets)

    def total_conditions(self):
        return sum(len(s.members) for s in self.sets)

    def prefixed(self, prefix):
        return DenseFamily(
            self.sets,
            tuple(f"{prefix}/{tag}" for tag in self.provenance),
            self.bounds,
        )

    @staticmethod
    def merge(*families):
        sets, tags, bounds = [], [], []
        for fam in families:
            sets.extend(fam.sets)
            tags.extend(fam.provenance)
            bounds.extend(fam.bounds)
        return DenseFamily(tuple(sets), tuple(tags), tuple(bounds))


def _dense_set(P, members, tag):
    c = classify(P, members)
    if not c.dense:
        raise SynthError(f"construction produced a non-dense set for {tag}: {c}")
    return DenseFamily((c,), (tag,))


def _embed_leq(P, p, value):
    return complete(P).embed[p] <= value


def _embed_disjoint(P, p, value):
    return not (complete(P).embed[p] & value)


def _forces_eq(P, p, s, t):
    return _embed_leq(P, p, bval_eq_names(P, s, t))


def _forces_neq(P, p, s, t):
    return _embed_disjoint(P, p, bval_eq_names(P, s, t))


def _forces_mem(P, p, t, s):
    return _embed_leq(P, p, bval_mem_names(P, t, s))


def _forces_notmem(P, p, t, s):
    return _embed_disjoint(P, p, bval_mem_names(P, t, s))


def _label(s, P):
    return name_to_dsl(s, P.top)


# -- equality with a ground value ------------------------------------------------


def family_check_equality(P, s, value):
    """Family guaranteeing: if some p in the filter forces s = value-check,
    then s interprets to the value. Trivial (empty) for check names."""
    if s.is_leaf or is_check(s, P.top):
        return DenseFamily()
    target = check_name(value, P.top)
    fams = []
    kids = children(s)
    if isinstance(value, frozenset):
        for b in sorted(value, key=hf_key):
            bname = check_name(b, P.top)
            members = frozenset(
                p
                for p in P.elements
                if _forces_neq(P, p, s, target)
                or any(
                    _forces_eq(P, p, kid, bname) and strongly_forces(P, p, kid, s)
                    for kid in kids
                )
            )
            fams.append(_dense_set(P, members, f"include[{hf_repr(b)}]"))
    for kid in kids:
        members = frozenset(
            p
            for p in P.elements
            if _forces_neq(P, p, s, target)
            or _forces_notmem(P, p, kid, s)
            or (
                isinstance(value, frozenset)
                and any(
                    _forces_eq(P, p, kid, check_name(b, P.top)) for b in value
                )
            )
        )
        fams.append(_dense_set(P, members, f"exclude[{_label(kid, P)}]"))
    if isinstance(value, frozenset):
        for kid in kids:
            for b in sorted(value, key=hf_key):
                sub = family_check_equality(P, kid, b)
                fams.append(sub.prefixed(f"child[{_label(kid, P)}={hf_repr(b)}]"))
    return DenseFamily.merge(*fams)


# -- general name-level families --------------------------------------------------


def _family_eq(P, s, t):
    if is_check(s, P.top) and is_check(t, P.top):
        return DenseFamily()
    if is_check(t, P.top):
        return family_check_equality(P, s, interpret_check(t))
    if is_check(s, P.top):
        return family_check_equality(P, t, interpret_check(s))
    fams = []
    for left, right, side in ((s, t, "left"), (t, s, "right")):
        for kid in children(left):
            members = frozenset(
                p
                for p in P.elements
                if _forces_neq(P, p, s, t)
                or _forces_notmem(P, p, kid, left)
                or any(
                    _forces_eq(P, p, kid, other)
                    and strongly_forces(P, p, other, right)
                    for other in children(right)
                )
            )
            fams.append(_dense_set(P, members, f"match-{side}[{_label(kid, P)}]"))
    for kid_s in children(s):
        for kid_t in children(t):
            sub = _family_eq(P, kid_s, kid_t)
            fams.append(
                sub.prefixed(f"pair[{_label(kid_s, P)}={_label(kid_t, P)}]")
            )
    return DenseFamily.merge(*fams)


def interpret_check(t):
    """Ground value of a check name."""
    if t.is_leaf:
        return t.leaf
    return frozenset(interpret_check(c) for c, _ in t.entries)


def _family_mem(P, t, s):
    kids = children(s)
    members = frozenset(
        p
        for p in P.elements
        if _forces_notmem(P, p, t, s)
        or any(
            _forces_eq(P, p, t, kid) and strongly_forces(P, p, kid, s)
            for kid in kids
        )
    )
    fams = [_dense_set(P, members, "member-witness")]
    for kid in kids:
        fams.append(_family_eq(P, t, kid).prefixed(f"against[{_label(kid, P)}]"))
    return DenseFamily.merge(*fams)


def _family_neq_const(P, s, value):
    if s.is_leaf or is_check(s, P.top):
        return DenseFamily()
    if not isinstance(value, frozenset):
        return DenseFamily()  # a set-shaped name never equals an urelement
    target = check_name(value, P.top)
    kids = children(s)
    members = frozenset(
        p
        for p in P.elements
        if _forces_eq(P, p, s, target)
        or any(
            strongly_forces(P, p, kid, s)
            and _forces_notmem(P, p, kid, target)
            for kid in kids
        )
        or any(
            _forces_notmem(P, p, check_name(b, P.top), s) for b in value
        )
    )
    fams = [_dense_set(P, members, "apartness")]
    for kid in kids:
        for b in sorted(value, key=hf_key):
            sub = _family_neq_const(P, kid, b)
            fams.append(sub.prefixed(f"child[{_label(kid, P)}!={hf_repr(b)}]"))
    return DenseFamily.merge(*fams)


def _family_neq(P, s, t):
    if is_check(t, P.top):
        return _family_neq_const(P, s, interpret_check(t))
    if is_check(s, P.top):
        return _family_neq_const(P, t, interpret_check(s))
    members = frozenset(
        p
        for p in P.elements
        if _forces_eq(P, p, s, t)
        or any(
            strongly_forces(P, p, kid, s) and _forces_notmem(P, p, kid, t)
            for kid in children(s)
        )
        or any(
            strongly_forces(P, p, kid, t) and _forces_notmem(P, p, kid, s)
            for kid in children(t)
        )
    )
    fams = [_dense_set(P, members, "apartness")]
    for kid_s in children(s):
        for kid_t in children(t):
            sub = _family_neq(P, kid_s, kid_t)
            fams.append(
                sub.prefixed(f"pair[{_label(kid_s, P)}!={_label(kid_t, P)}]")
            )
    return DenseFamily.merge(*fams)


def _family_notmem(P, t, s):
    fams = [
        _family_neq(P, t, kid).prefixed(f"avoid[{_label(kid, P)}]")
        for kid in children(s)
    ]
    return DenseFamily.merge(*fams)


# -- interpretation agreement ------------------------------------------------------


def family_interp_agreement(P, s):
    """Family making interpretation and quasi-interpretation agree.

    One set per urelement of the name: conditions either forcing it out or
    strongly forcing it in. Whole-poset sets for check names.
    """
    from .names import is_rank1_over_base

    if s.is_leaf or not is_rank1_over_base(s):
        raise SynthError("interpretation agreement needs a set-shaped rank <= 1 name")
    fams = []
    for x in sorted(name_base(s)):
        xname = check_name(x, P.top)
        members = frozenset(
            p
            for p in P.elements
            if _forces_notmem(P, p, xname, s) or strongly_forces(P, p, xname, s)
        )
        fams.append(_dense_set(P, members, f"decide[{x}]"))
    return DenseFamily.merge(*fams)


# -- formula-level families ---------------------------------------------------------


def family_for_formula(P, f, env):
    """The full recursion over a normalized formula."""
    env = dict(env)
    return _family_formula(P, nnf(f), env)


def _term_name(P, t, env):
    from .semantics import Var

    if isinstance(t, Var):
        if t.name not in env:
            raise KeyError(f"unbound variable {t.name!r}")
        return env[t.name]
    return check_name(t.value, P.top)


def _family_formula(P, f, env):
    if isinstance(f, Eq):
        return _family_eq(P, _term_name(P, f.left, env), _term_name(P, f.right, env))
    if isinstance(f, Mem):
        return _family_mem(P, _term_name(P, f.left, env), _term_name(P, f.right, env))
    if isinstance(f, Not):
        inner = f.body
        if isinstance(inner, Eq):
            return _family_neq(
                P, _term_name(P, inner.left, env), _term_name(P, inner.right, env)
            )
        if isinstance(inner, Mem):
            return _family_notmem(
                P, _term_name(P, inner.left, env), _term_name(P, inner.right, env)
            )
        raise SynthError("formula must be in negation normal form")
    if isinstance(f, And):
        return DenseFamily.merge(
            _family_formula(P, f.left, env), _family_formula(P, f.right, env)
        )
    if isinstance(f, Or):
        members = frozenset(
            p
            for p in P.elements
            if forces(P, p, Not(f), env)
            or forces(P, p, f.left, env)
            or forces(P, p, f.right, env)
        )
        return DenseFamily.merge(
            _dense_set(P, members, "decide-disjunct"),
            _family_formula(P, f.left, env),
            _family_formula(P, f.right, env),
        )
    if isinstance(f, All):
        bound = _term_name(P, f.bound, env)
        kids = () if bound.is_leaf else children(bound)
        fams = []
        for kid in kids:
            sub = _family_formula(P, f.body, {**env, f.var: kid})
            fams.append(sub.prefixed(f"each[{_label(kid, P)}]"))
        return DenseFamily.merge(*fams)
    if isinstance(f, Ex):
        bound = _term_name(P, f.bound, env)
        kids = () if bound.is_leaf else children(bound)
        members = frozenset(
            p
            for p in P.elements
            if forces(P, p, Not(f), env)
            or any(
                strongly_forces(P, p, kid, bound)
                and forces(P, p, f.body, {**env, f.var: kid})
                for kid in kids
            )
        )
        fams = [_dense_set(P, members, "witness-exists")]
        for kid in kids:
            sub = _family_formula(P, f.body, {**env, f.var: kid})
            fams.append(sub.prefixed(f"candidate[{_label(kid, P)}]"))
        return DenseFamily.merge(*fams)
    raise SynthError(f"unsupported formula node: {f!r}")


# -- bounded (predense) variant -------------------------------------------------------


def _predense_set(B, values, tag, bound):
    P = B.as_poset()
    members = frozenset(B.element_id(v) for v in values if v)
    c = classify(P, members)
    if not c.predense:
        raise SynthError(f"construction produced a non-predense set for {tag}")
    if len(members) > bound:
        raise SynthError(f"size bound violated for {tag}: {len(members)} > {bound}")
    return DenseFamily((c,), (tag,), (bound,))


def _bval_eq(B, s, t):
    return bval_eq_names(B.as_poset(), s, t)


def _bval_mem(B, t, s):
    return bval_mem_names(B.as_poset(), t, s)


def _bval_formula(B, f, env):
    # names over the algebra live on B.as_poset(), whose completion has the
    # same atoms as B, so values are directly usable as B elements
    from .semantics import boolean_value

    return boolean_value(complete(B.as_poset()), f, env)


def _cond(B, q):
    return B.id_element(q)


def family_for_formula_bounded(B, f, env, m):
    """Predense variant over a Boolean-algebra forcing with m-bounded names.

    Arbitrary witness conditions are replaced by suprema; strong-forcing
    witnesses by the (at most m per ground value) entry conditions. Each set
    carries its constructed size bound.
    """
    env = dict(env)
    for v, nm in env.items():
        if not is_lambda_bounded(nm, m):
            raise SynthError(f"name {v} is not {m}-bounded")
    return _bounded_formula(B, nnf(f), env)


def _bounded_eq_const(B, s, value):
    P = B.as_poset()
    if s.is_leaf or is_check(s, P.top):
        return DenseFamily()
    target = check_name(value, P.top)
    neq = B.complement(_bval_eq(B, s, target))
    fams = []
    if isinstance(value, frozenset):
        for b in sorted(value, key=hf_key):
            bname = check_name(b, P.top)
            vals = [neq] + [
                _cond(B, q) & _bval_eq(B, kid, bname) for kid, q in s.entries
            ]
            fams.append(
                _predense_set(
                    B, vals, f"include*[{hf_repr(b)}]", 1 + len(s.entries)
                )
            )
    nvals = len(value) if isinstance(value, frozenset) else 0
    for kid in children(s):
        vals = [neq, B.complement(_bval_mem(B, kid, target))]
        if isinstance(value, frozenset):
            vals += [
                _bval_eq(B, kid, check_name(b, P.top))
                for b in sorted(value, key=hf_key)
            ]
        fams.append(_predense_set(B, vals, f"exclude*[{_label(kid, P)}]", 2 + nvals))
    if isinstance(value, frozenset):
        for kid in children(s):
            for b in sorted(value, key=hf_key):
                fams.append(
                    _bounded_eq_const(B, kid, b).prefixed(
                        f"child[{_label(kid, P)}={hf_repr(b)}]"
                    )
                )
    return DenseFamily.merge(*fams)


def _bounded_eq(B, s, t):
    P = B.as_poset()
    if is_check(t, P.top):
        return _bounded_eq_const(B, s, interpret_check(t))
    if is_check(s, P.top):
        return _bounded_eq_const(B, t, interpret_check(s))
    fams = []
    for left, right, side in ((s, t, "left"), (t, s, "right")):
        neq = B.complement(_bval_eq(B, s, t))
        for kid in children(left):
            vals = [neq, B.complement(_bval_mem(B, kid, left))] + [
                _cond(B, q) & _bval_eq(B, kid, other) for other, q in right.entries
            ]
            fams.append(
                _predense_set(
                    B,
                    vals,
                    f"match*-{side}[{_label(kid, P)}]",
                    2 + len(right.entries),
                )
            )
    for kid_s in children(s):
        for kid_t in children(t):
            fams.append(
                _bounded_eq(B, kid_s, kid_t).prefixed(
                    f"pair[{_label(kid_s, P)}={_label(kid_t, P)}]"
                )
            )
    return DenseFamily.merge(*fams)


def _bounded_mem(B, t, s):
    P = B.as_poset()
    vals = [B.complement(_bval_mem(B, t, s))] + [
        _cond(B, q) & _bval_eq(B, t, kid) for kid, q in s.entries
    ]
    fams = [_predense_set(B, vals, "member-witness*", 1 + len(s.entries))]
    for kid in children(s):
        fams.append(_bounded_eq(B, t, kid).prefixed(f"against[{_label(kid, P)}]"))
    return DenseFamily.merge(*fams)


def _bounded_neq_const(B, s, value):
    P = B.as_poset()
    if s.is_leaf or is_check(s, P.top) or not isinstance(value, frozenset):
        return DenseFamily()
    target = check_name(value, P.top)
    vals = [_bval_eq(B, s, target)]
    vals += [
        _cond(B, q) & B.complement(_bval_mem(B, kid, target))
        for kid, q in s.entries
    ]
    vals += [
        B.complement(_bval_mem(B, check_name(b, P.top), s))
        for b in sorted(value, key=hf_key)
    ]
    fams = [
        _predense_set(B, vals, "apartness*", 1 + len(s.entries) + len(value))
    ]
    for kid in children(s):
        for b in sorted(value, key=hf_key):
            fams.append(
                _bounded_neq_const(B, kid, b).prefixed(
                    f"child[{_label(kid, P)}!={hf_repr(b)}]"
                )
            )
    return DenseFamily.merge(*fams)


def _bounded_neq(B, s, t):
    P = B.as_poset()
    if is_check(t, P.top):
        return _bounded_neq_const(B, s, interpret_check(t))
    if is_check(s, P.top):
        return _bounded_neq_const(B, t, interpret_check(s))
    vals = [_bval_eq(B, s, t)]
    vals += [
        _cond(B, q) & B.complement(_bval_mem(B, kid, t)) for kid, q in s.entries
    ]
    vals += [
        _cond(B, q) & B.complement(_bval_mem(B, kid, s)) for kid, q in t.entries
    ]
    fams = [
        _predense_set(
            B, vals, "apartness*", 1 + len(s.entries) + len(t.entries)
        )
    ]
    for kid_s in children(s):
        for kid_t in children(t):
            fams.append(
                _bounded_neq(B, kid_s, kid_t).prefixed(
                    f"pair[{_label(kid_s, P)}!={_label(kid_t, P)}]"
                )
            )
    return DenseFamily.merge(*fams)


def _bounded_formula(B, f, env):
    P = B.as_poset()
    if isinstance(f, Eq):
        return _bounded_eq(B, _term_name(P, f.left, env), _term_name(P, f.right, env))
    if isinstance(f, Mem):
        return _bounded_mem(B, _term_name(P, f.left, env), _term_name(P, f.right, env))
    if isinstance(f, Not):
        inner = f.body
        if isinstance(inner, Eq):
            return _bounded_neq(
                B, _term_name(P, inner.left, env), _term_name(P, inner.right, env)
            )
        if isinstance(inner, Mem):
            fams = [
                _bounded_neq(
                    B, _term_name(P, inner.left, env), kid
                ).prefixed(f"avoid[{_label(kid, P)}]")
                for kid in children(_term_name(P, inner.right, env))
            ]
            return DenseFamily.merge(*fams)
        raise SynthError("formula must be in negation normal form")
    if isinstance(f, And):
        return DenseFamily.merge(
            _bounded_formula(B, f.left, env), _bounded_formula(B, f.right, env)
        )
    if isinstance(f, Or):
        vals = [
            _bval_formula(B, Not(f), env),
            _bval_formula(B, f.left, env),
            _bval_formula(B, f.right, env),
        ]
        return DenseFamily.merge(
            _predense_set(B, vals, "decide-disjunct*", 3),
            _bounded_formula(B, f.left, env),
            _bounded_formula(B, f.right, env),
        )
    if isinstance(f, All):
        bound = _term_name(P, f.bound, env)
        kids = () if bound.is_leaf else children(bound)
        fams = [
            _bounded_formula(B, f.body, {**env, f.var: kid}).prefixed(
                f"each[{_label(kid, P)}]"
            )
            for kid in kids
        ]
        return DenseFamily.merge(*fams)
    if isinstance(f, Ex):
        bound = _term_name(P, f.bound, env)
        entries = () if bound.is_leaf else bound.entries
        vals = [_bval_formula(B, Not(f), env)]
        for kid, q in entries:
            vals.append(_cond(B, q) & _bval_formula(B, f.body, {**env, f.var: kid}))
        fams = [_predense_set(B, vals, "witness-exists*", 1 + len(entries))]
        for kid in ({k for k, _ in entries}):
            fams.append(
                _bounded_formula(B, f.body, {**env, f.var: kid}).prefixed(
                    f"candidate[{_label(kid, P)}]"
                )
            )
        return DenseFamily.merge(*fams)
    raise SynthError(f"unsupported formula node: {f!r}")


# -- encoding families as names ----------------------------------------------------------


def encode_family_as_name(P, dsets, values):
    """The name {(value-check, p) : p in the value's dense set}.

    The top forces it equal to the check of the value set, and a filter
    interprets it correctly exactly when it meets every input set.
    """
    dsets = [frozenset(getattr(d, "members", d)) for d in dsets]
    values = list(values)
    if len(dsets) != len(values):
        raise SynthError("need one ground value per dense set")
    if len({hf_key(v) for v in values}) != len(values):
        raise SynthError("ground values must be pairwise distinct")
    for i, d in enumerate(dsets):
        if not classify(P, d).dense:
            raise SynthError(f"input set {i} is not dense")
    pairs = []
    for value, dset in zip(values, dsets):
        vname = check_name(value, P.top)
        pairs.extend((vname, p) for p in sorted(dset))
    return make_name(pairs)


def recover_family(P, s, values):
    """Per ground value, the conditions strongly forcing its check into s."""
    out = []
    for value in values:
        vname = check_name(value, P.top)
        out.append(
            frozenset(p for p in P.elements if strongly_forces(P, p, vname, s))
        )
    return out


# -- guarantee verification ---------------------------------------------------------------


def meets_all(g, family):
    return all(g.members & s.members for s in family.sets)


def family_guarantee_violations(P, f, env, family, filters=None):
    """Exhaustive check of the family guarantee; returns violating filters.

    A violation is a filter that meets every set of the family, contains a
    condition forcing the fact, yet interprets the names so the fact fails
    in the ground model.
    """
    env = dict(env)
    out = []
    for g in filters if filters is not None else enumerate_filters(P):
        if not meets_all(g, family):
            continue
        if not any(forces(P, p, f, env) for p in g.members):
            continue
        ground = {v: interpret(n, g) for v, n in env.items()}
        if not eval_ground(f, ground):
            out.append(g)
    return out
