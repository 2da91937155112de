"""Bounded (Sigma_0) formulas over names: parser, ground evaluation,
Boolean-valued evaluation, and the forcing relations.

Two independent deciders are provided for `p forces phi`: comparison of the
embedding against the recursively computed Boolean value, and ground truth
in every atom-generated filter through p. The suite cross-checks them.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .boolcomp import complete
from .dsl import Cursor
from .names import PName, check_name, children, interpret, name_to_dsl, parse_hf_cursor
from .order import generic_filters


# -- AST -----------------------------------------------------------------------


def _cache_hash(cls):
    """Formula nodes sit in memo keys; cache their recursive hashes."""
    generated = cls.__hash__

    def cached(self):
        try:
            return object.__getattribute__(self, "_hash")
        except AttributeError:
            h = generated(self)
            object.__setattr__(self, "_hash", h)
            return h

    cls.__hash__ = cached
    return cls


@_cache_hash
@dataclass(frozen=True)
class Var:
    name: str


@_cache_hash
@dataclass(frozen=True)
class Lit:
    value: object  # int urelement or frozenset


@_cache_hash
@dataclass(frozen=True)
class Eq:
    left: object
    right: object


@_cache_hash
@dataclass(frozen=True)
class Mem:
    left: object
    right: object


@_cache_hash
@dataclass(frozen=True)
class Not:
    body: object


@_cache_hash
@dataclass(frozen=True)
class And:
    left: object
    right: object


@_cache_hash
@dataclass(frozen=True)
class Or:
    left: object
    right: object


@_cache_hash
@dataclass(frozen=True)
class All:
    var: str
    bound: object
    body: object


@_cache_hash
@dataclass(frozen=True)
class Ex:
    var: str
    bound: object
    body: object


KEYWORDS = {"not", "and", "or", "forall", "exists", "in", "chk"}

# Default configuration caps; the CLI refuses instances beyond these.
DEPTH_CAP = 3
POSET_CAP = 6


def free_vars(f):
    if isinstance(f, Var):
        return frozenset({f.name})
    if isinstance(f, Lit):
        return frozenset()
    if isinstance(f, (Eq, Mem)):
        return free_vars(f.left) | free_vars(f.right)
    if isinstance(f, Not):
        return free_vars(f.body)
    if isinstance(f, (And, Or)):
        return free_vars(f.left) | free_vars(f.right)
    if isinstance(f, (All, Ex)):
        return free_vars(f.bound) | (free_vars(f.body) - {f.var})
    raise TypeError(f"not a formula node: {f!r}")


def depth(f):
    """Nesting depth; atoms have depth 1."""
    if isinstance(f, (Eq, Mem)):
        return 1
    if isinstance(f, Not):
        return 1 + depth(f.body)
    if isinstance(f, (And, Or)):
        return 1 + max(depth(f.left), depth(f.right))
    if isinstance(f, (All, Ex)):
        return 1 + depth(f.body)
    raise TypeError(f"not a formula node: {f!r}")


def nnf(f, negate=False):
    """Negation normal form: negations pushed onto atoms."""
    if isinstance(f, (Eq, Mem)):
        return Not(f) if negate else f
    if isinstance(f, Not):
        return nnf(f.body, not negate)
    if isinstance(f, And):
        a, b = nnf(f.left, negate), nnf(f.right, negate)
        return Or(a, b) if negate else And(a, b)
    if isinstance(f, Or):
        a, b = nnf(f.left, negate), nnf(f.right, negate)
        return And(a, b) if negate else Or(a, b)
    if isinstance(f, All):
        body = nnf(f.body, negate)
        return Ex(f.var, f.bound, body) if negate else All(f.var, f.bound, body)
    if isinstance(f, Ex):
        body = nnf(f.body, negate)
        return All(f.var, f.bound, body) if negate else Ex(f.var, f.bound, body)
    raise TypeError(f"not a formula node: {f!r}")


# -- parser ---------------------------------------------------------------------


def _parse_term(cur):
    if cur.accept("chk"):
        return Lit(parse_hf_cursor(cur))
    tok = cur.current
    if tok.kind == "id" and tok.text not in KEYWORDS:
        cur.advance()
        return Var(tok.text)
    cur.error("expected a term ('chk HF' or a name variable)")


def _parse_atom_or_group(cur):
    if cur.accept("not"):
        return Not(_parse_atom_or_group(cur))
    if cur.peek("forall") or cur.peek("exists"):
        kind = cur.advance().text
        var_tok = cur.current
        if var_tok.kind != "id" or var_tok.text in KEYWORDS:
            cur.error("expected a quantifier variable")
        cur.advance()
        if not cur.peek("in"):
            cur.error("unbounded quantifier: every quantifier needs 'in TERM'")
        cur.expect("in")
        bound = _parse_term(cur)
        cur.expect("(")
        body = _parse_or(cur)
        cur.expect(")")
        node = All if kind == "forall" else Ex
        return node(var_tok.text, bound, body)
    if cur.accept("("):
        inner = _parse_or(cur)
        cur.expect(")")
        return inner
    left = _parse_term(cur)
    if cur.accept("="):
        return Eq(left, _parse_term(cur))
    if cur.accept("in"):
        return Mem(left, _parse_term(cur))
    cur.error("expected '=' or 'in' after a term")


def _parse_and(cur):
    node = _parse_atom_or_group(cur)
    while cur.accept("and"):
        node = And(node, _parse_atom_or_group(cur))
    return node


def _parse_or(cur):
    node = _parse_and(cur)
    while cur.accept("or"):
        node = Or(node, _parse_and(cur))
    return node


def parse_formula(text):
    """Parse a bounded formula; unbounded quantifiers are rejected."""
    cur = Cursor(text)
    f = _parse_or(cur)
    if not cur.at_end():
        cur.error("trailing input after formula")
    return f


def formula_to_text(f):
    from .names import hf_repr

    def term(t):
        if isinstance(t, Var):
            return t.name
        return f"chk {hf_repr(t.value)}"

    if isinstance(f, Eq):
        return f"{term(f.left)} = {term(f.right)}"
    if isinstance(f, Mem):
        return f"{term(f.left)} in {term(f.right)}"
    if isinstance(f, Not):
        return f"not ({formula_to_text(f.body)})"
    if isinstance(f, And):
        return f"({formula_to_text(f.left)}) and ({formula_to_text(f.right)})"
    if isinstance(f, Or):
        return f"({formula_to_text(f.left)}) or ({formula_to_text(f.right)})"
    if isinstance(f, All):
        return f"forall {f.var} in {term(f.bound)} ({formula_to_text(f.body)})"
    if isinstance(f, Ex):
        return f"exists {f.var} in {term(f.bound)} ({formula_to_text(f.body)})"
    raise TypeError(f"not a formula node: {f!r}")


# -- ground evaluation ------------------------------------------------------------


def _ground_term(t, env):
    if isinstance(t, Var):
        if t.name not in env:
            raise KeyError(f"unbound variable {t.name!r}")
        return env[t.name]
    return t.value


def eval_ground(f, env):
    """Standard satisfaction over hereditarily finite values."""
    if isinstance(f, Eq):
        return _ground_term(f.left, env) == _ground_term(f.right, env)
    if isinstance(f, Mem):
        container = _ground_term(f.right, env)
        if isinstance(container, int):
            return False  # urelements have no members
        return _ground_term(f.left, env) in container
    if isinstance(f, Not):
        return not eval_ground(f.body, env)
    if isinstance(f, And):
        return eval_ground(f.left, env) and eval_ground(f.right, env)
    if isinstance(f, Or):
        return eval_ground(f.left, env) or eval_ground(f.right, env)
    if isinstance(f, (All, Ex)):
        bound = _ground_term(f.bound, env)
        items = () if isinstance(bound, int) else bound
        results = (
            eval_ground(f.body, {**env, f.var: x}) for x in items
        )
        return all(results) if isinstance(f, All) else any(results)
    raise TypeError(f"not a formula node: {f!r}")


# -- Boolean values ----------------------------------------------------------------


class _Context:
    """Per-poset evaluation context with memoized name-pair values.

    Boolean elements are carried as atom bitmasks internally; only the
    public entry points convert to frozensets of atoms.
    """

    def __init__(self, P):
        self.P = P
        self.B = complete(P)
        self.one = self.B.one_mask
        self.embm = {p: self.B.embed_mask(p) for p in P.elements}
        self._eq = {}
        self._mem = {}
        self._formula = {}

    def eq(self, s, t):
        if s.is_leaf and t.is_leaf:
            return self.one if s.leaf == t.leaf else 0
        if s.is_leaf or t.is_leaf:
            return 0  # an urelement is never a set
        key = (s, t)
        got = self._eq.get(key)
        if got is not None:
            return got
        value = self._subset(s, t) & self._subset(t, s)
        self._eq[key] = value
        self._eq[(t, s)] = value
        return value

    def _subset(self, s, t):
        acc = self.one
        for child, q in s.entries:
            acc &= (self.one ^ self.embm[q]) | self.mem(child, t)
            if not acc:
                break
        return acc

    def mem(self, s, t):
        if t.is_leaf:
            return 0
        key = (s, t)
        got = self._mem.get(key)
        if got is not None:
            return got
        acc = 0
        for child, q in t.entries:
            acc |= self.embm[q] & self.eq(s, child)
            if acc == self.one:
                break
        self._mem[key] = acc
        return acc

    def term_name(self, t, env):
        if isinstance(t, Var):
            if t.name not in env:
                raise KeyError(f"unbound variable {t.name!r}")
            return env[t.name]
        return check_name(t.value, self.P.top)

    def formula(self, f, env):
        key = (f, tuple(sorted(env.items())))
        got = self._formula.get(key)
        if got is not None:
            return got
        value = self._formula_raw(f, env)
        self._formula[key] = value
        return value

    def _formula_raw(self, f, env):
        if isinstance(f, Eq):
            return self.eq(self.term_name(f.left, env), self.term_name(f.right, env))
        if isinstance(f, Mem):
            return self.mem(self.term_name(f.left, env), self.term_name(f.right, env))
        if isinstance(f, Not):
            return self.one ^ self.formula(f.body, env)
        if isinstance(f, And):
            return self.formula(f.left, env) & self.formula(f.right, env)
        if isinstance(f, Or):
            return self.formula(f.left, env) | self.formula(f.right, env)
        if isinstance(f, (All, Ex)):
            bound = self.term_name(f.bound, env)
            kids = () if bound.is_leaf else children(bound)
            if isinstance(f, All):
                acc = self.one
                for child in kids:
                    inner = {**env, f.var: child}
                    acc &= (self.one ^ self.mem(child, bound)) | self.formula(
                        f.body, inner
                    )
                    if not acc:
                        break
                return acc
            acc = 0
            for child in kids:
                inner = {**env, f.var: child}
                acc |= self.mem(child, bound) & self.formula(f.body, inner)
                if acc == self.one:
                    break
            return acc
        raise TypeError(f"not a formula node: {f!r}")


_contexts = {}


def _context(P):
    ctx = _contexts.get(P)
    if ctx is None:
        ctx = _Context(P)
        _contexts[P] = ctx
    return ctx


def boolean_value(B, f, env):
    """The Boolean value of a formula under a name assignment, as an atom set."""
    ctx = _context(B.poset)
    return ctx.B.set_of(ctx.formula(f, dict(env)))


def boolean_value_mask(P, f, env_items):
    """Boolean value as an atom bitmask; env_items must be pre-sorted.

    Fast path for sweeps that evaluate many formulas against one assignment.
    """
    ctx = _context(P)
    key = (f, env_items)
    got = ctx._formula.get(key)
    if got is None:
        got = ctx.formula(f, dict(env_items))
    return got


def forcing_masks(P):
    """(full mask, condition -> embedding mask) for mask-level comparisons."""
    ctx = _context(P)
    return ctx.one, ctx.embm


def bval_eq_names(P, s, t):
    ctx = _context(P)
    return ctx.B.set_of(ctx.eq(s, t))


def bval_mem_names(P, s, t):
    ctx = _context(P)
    return ctx.B.set_of(ctx.mem(s, t))


def embed_below(P, p, value):
    """Whether the embedding of p lies below a Boolean value (atom set)."""
    return complete(P).embed[p] <= value


def forces(P, p, f, env):
    """Boolean-value decider: embed(p) <= [[f]]."""
    ctx = _context(P)
    P.check_element(p)
    return ctx.embm[p] & ~ctx.formula(f, dict(env)) == 0


def forces_all_generics(P, p, f, env):
    """Independent decider: ground truth in every atom-generated filter through p."""
    P.check_element(p)
    for G in generic_filters(P):
        if p in G.members:
            ground = {v: interpret(n, G) for v, n in env.items()}
            if not eval_ground(f, ground):
                return False
    return True


def strongly_forces(P, p, t, s):
    """Some entry (t, q) of s has q above p."""
    P.check_element(p)
    if s.is_leaf:
        return False
    return any(child == t and P.leq(p, q) for child, q in s.entries)


# -- canonical formula family -------------------------------------------------------


def literal_pool(base):
    """Ground literals used by the canonical enumeration."""
    base = tuple(sorted(base))
    lits = [x for x in base]
    lits.append(frozenset())
    lits.extend(frozenset({x}) for x in base)
    if len(base) > 1:
        lits.append(frozenset(base))
    out = []
    for l in lits:
        if l not in out:
            out.append(l)
    return out


@lru_cache(maxsize=None)
def canonical_formulas(variables, base, max_depth=3):
    """Deterministic finite family of bounded formulas of depth <= max_depth.

    Every production of the grammar is exercised at every depth: all
    variable-containing atoms, all their negations, binary connectives over
    consecutive atom pairs, and both quantifiers with atomic and compound
    bodies. This is the canonical enumeration used by the cross-check suite
    and the simultaneous name principle.
    """
    variables = tuple(variables)
    terms = [Var(v) for v in variables] + [Lit(l) for l in literal_pool(base)]

    def has_var(t):
        return isinstance(t, Var)

    atoms = []
    for i, t1 in enumerate(terms):
        for t2 in terms[i:]:
            if has_var(t1) or has_var(t2):
                atoms.append(Eq(t1, t2))
    for t1 in terms:
        for t2 in terms:
            if has_var(t1) or has_var(t2):
                atoms.append(Mem(t1, t2))

    x = "x_"
    x_terms = terms + [Var(x)]
    x_atoms = []
    for t in x_terms:
        if t != Var(x):
            x_atoms.append(Eq(Var(x), t))
            x_atoms.append(Mem(Var(x), t))
            x_atoms.append(Mem(t, Var(x)))
    bounds = [Var(v) for v in variables] or [Lit(frozenset(base))]

    def pair_up(fs, node):
        return [node(fs[i], fs[i + 1]) for i in range(0, len(fs) - 1, 2)]

    levels = {1: list(atoms)}
    out = list(atoms)
    if max_depth >= 2:
        lvl2 = [Not(a) for a in atoms]
        lvl2 += pair_up(atoms, And)
        lvl2 += pair_up(atoms, Or)
        for b in bounds:
            for a in x_atoms:
                lvl2.append(All(x, b, a))
                lvl2.append(Ex(x, b, a))
        levels[2] = lvl2
        out += lvl2
    for d in range(3, max_depth + 1):
        prev = levels[d - 1]
        lvl = [Not(f) for f in prev[:: max(1, len(prev) // 24)]]
        lvl += pair_up(prev[:: max(1, len(prev) // 24)], And)
        lvl += pair_up(prev[:: max(1, len(prev) // 24)], Or)
        x_prev = [Not(a) for a in x_atoms] + pair_up(x_atoms, And) + pair_up(x_atoms, Or)
        for b in bounds:
            for body in x_prev[:: max(1, len(x_prev) // 16)]:
                lvl.append(All(x, b, body))
                lvl.append(Ex(x, b, body))
        y = "y_"
        for b in bounds:
            lvl.append(All(x, b, Ex(y, Var(x), Eq(Var(y), Var(y)))))
            lvl.append(Ex(x, b, All(y, Var(x), Mem(Var(y), b))))
        levels[d] = lvl
        out += lvl
    return tuple(out)
