"""Quotients of a name universe by an ultrafilter on a finite completion.

Names are identified when the Boolean value of their equality lies in the
ultrafilter; membership between classes works the same way. On finite
algebras every ultrafilter is atom-generated, hence generic, so the
check-name classes always form a faithful copy of the ground values; the
ill-founded regime cannot occur here, and missed_antichains is exposed as
a guard that provably returns nothing.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .boolcomp import atom_of_ultrafilter, complete
from .names import (
    check_name,
    enumerate_names,
    hf_depth,
    hf_max_branching,
    interpret,
    is_rank1_over_base,
    name_base,
    quasi_interpret,
)
from .semantics import (
    All,
    And,
    Eq,
    Ex,
    Lit,
    Mem,
    Not,
    Or,
    Var,
    boolean_value,
    bval_eq_names,
    bval_mem_names,
)


class UltrapowerError(ValueError):
    pass


# hard module caps; the universe spec must stay within them
MAX_RANK = 3
MAX_BASE = 3
MAX_SMALL = 3
MAX_WEIGHT = 4


@dataclass(frozen=True)
class UniverseSpec:
    rank: int = 2
    small: int = 2
    base: tuple = (0, 1)
    weight: int = 2

    def validate(self):
        if (
            self.rank > MAX_RANK
            or len(self.base) > MAX_BASE
            or self.small > MAX_SMALL
            or self.weight > MAX_WEIGHT
        ):
            raise UltrapowerError(f"universe spec exceeds caps: {self}")


class QuotientModel:
    """Universe of names modulo equality-in-the-ultrafilter."""

    def __init__(self, algebra, ultra, spec, names, classes, class_index):
        self.algebra = algebra
        self.ultra = ultra
        self.spec = spec
        self.names = names
        self.classes = classes
        self.class_index = class_index
        self.forcing = algebra.as_poset()
        self._mem = {}

    @property
    def atom(self):
        return atom_of_ultrafilter(self.algebra, self.ultra)

    def _in_ultra(self, value):
        return bool(value) and self.algebra.element_id(value) in self.ultra.members

    def rep(self, i):
        return self.classes[i][0]

    def class_of(self, name):
        """Class index of a name, matching outside names up to =_U."""
        idx = self.class_index.get(name)
        if idx is not None:
            return idx
        for i in range(len(self.classes)):
            if self._in_ultra(bval_eq_names(self.forcing, name, self.rep(i))):
                return i
        raise UltrapowerError(f"name has no class in the universe: {name!r}")

    def mem(self, i, j):
        key = (i, j)
        got = self._mem.get(key)
        if got is None:
            got = self._in_ultra(
                bval_mem_names(self.forcing, self.rep(i), self.rep(j))
            )
            self._mem[key] = got
        return got

    def elements_of(self, j):
        return [i for i in range(len(self.classes)) if self.mem(i, j)]

    def __len__(self):
        return len(self.classes)


def build_quotient(B, U, spec=UniverseSpec()):
    """Quotient the canonical name universe over the algebra by =_U.

    Universe conditions are drawn from the canonical pool: the atoms and
    the top of the algebra. Representatives are least in enumeration order.
    """
    spec.validate()
    atom_of_ultrafilter(B, U)  # raises when U is not an ultrafilter
    PB = B.as_poset()
    pool = sorted({B.element_id(frozenset({a})) for a in B.atoms} | {PB.top})
    universe = enumerate_names(
        PB,
        max_rank=spec.rank,
        max_entries=spec.small,
        max_weight=spec.weight,
        base=spec.base,
        small=spec.small,
        conditions=pool,
    )
    classes = []
    class_index = {}
    for nm in universe:
        placed = False
        for i, cls in enumerate(classes):
            value = bval_eq_names(PB, nm, cls[0])
            if value and B.element_id(value) in U.members:
                cls.append(nm)
                class_index[nm] = i
                placed = True
                break
        if not placed:
            class_index[nm] = len(classes)
            classes.append([nm])
    classes = tuple(tuple(cls) for cls in classes)
    return QuotientModel(B, U, spec, universe, classes, class_index)


def embedding_j(M, x):
    """Class of the check name of a ground value."""
    spec = M.spec
    if hf_depth(x) > spec.rank or hf_max_branching(x) > spec.small:
        raise UltrapowerError(f"value exceeds the universe depth caps: {x!r}")
    for u in name_base(check_name(x, M.forcing.top)) or frozenset():
        if u not in set(spec.base):
            raise UltrapowerError(f"urelement {u} outside the universe base")
    return M.class_of(check_name(x, M.forcing.top))


# -- Los agreement ------------------------------------------------------------------


def _sat(M, f, assignment):
    """Satisfaction in the quotient structure; variables range over classes."""

    def term_class(t):
        if isinstance(t, Var):
            if t.name not in assignment:
                raise KeyError(f"unbound variable {t.name!r}")
            return assignment[t.name]
        return M.class_of(check_name(t.value, M.forcing.top))

    if isinstance(f, Eq):
        return term_class(f.left) == term_class(f.right)
    if isinstance(f, Mem):
        return M.mem(term_class(f.left), term_class(f.right))
    if isinstance(f, Not):
        return not _sat(M, f.body, assignment)
    if isinstance(f, And):
        return _sat(M, f.left, assignment) and _sat(M, f.right, assignment)
    if isinstance(f, Or):
        return _sat(M, f.left, assignment) or _sat(M, f.right, assignment)
    if isinstance(f, (All, Ex)):
        bound = term_class(f.bound)
        results = (
            _sat(M, f.body, {**assignment, f.var: c}) for c in M.elements_of(bound)
        )
        return all(results) if isinstance(f, All) else any(results)
    raise TypeError(f"not a formula node: {f!r}")


def check_los(M, f, env):
    """Quotient truth iff the Boolean value lies in the ultrafilter."""
    env = dict(env)
    assignment = {v: M.class_of(nm) for v, nm in env.items()}
    left = _sat(M, f, assignment)
    B2 = complete(M.forcing)
    right = M._in_ultra(boolean_value(B2, f, env))
    return left == right


def check_trace_identity(M, s):
    """Membership below the class of a rank-1 name matches, through the
    embedding, the quasi-interpretation by the ultrafilter."""
    if not is_rank1_over_base(s):
        raise UltrapowerError("trace identity needs a rank <= 1 name")
    base = sorted(set(M.spec.base))
    j_of = {x: embedding_j(M, x) for x in base}
    cls = M.class_of(s)
    left = {j_of[x] for x in base if M.mem(j_of[x], cls)}
    right = {j_of[x] for x in quasi_interpret(s, M.ultra, base=base)}
    return left == right


# -- embedding elementarity ------------------------------------------------------------


@dataclass(frozen=True)
class SAtom:
    """Unary predicate atom for the elementarity signature."""

    var: str


def fo_sentences(depth=3):
    """Canonical prenex sentences: every quantifier prefix of the given
    length over matrices built from literals and consecutive literal pairs."""
    variables = [f"x{i}" for i in range(depth)]
    atoms = []
    for a, b in itertools.combinations(variables, 2):
        atoms.append(Eq(Var(a), Var(b)))
    for a in variables:
        for b in variables:
            if a != b:
                atoms.append(Mem(Var(a), Var(b)))
    atoms += [SAtom(v) for v in variables]
    literals = atoms + [Not(a) for a in atoms]
    matrices = list(literals)
    matrices += [And(literals[i], literals[i + 1]) for i in range(len(literals) - 1)]
    matrices += [Or(literals[i], literals[i + 1]) for i in range(len(literals) - 1)]
    out = []
    for prefix in itertools.product("AE", repeat=depth):
        for m in matrices:
            out.append((prefix, tuple(variables), m))
    return tuple(out)


def _eval_fo(domain, mem_rel, pred, sentence):
    prefix, variables, matrix = sentence

    def matrix_value(assignment):
        def ev(f):
            if isinstance(f, SAtom):
                return pred(assignment[f.var])
            if isinstance(f, Eq):
                return assignment[f.left.name] == assignment[f.right.name]
            if isinstance(f, Mem):
                return mem_rel(assignment[f.left.name], assignment[f.right.name])
            if isinstance(f, Not):
                return not ev(f.body)
            if isinstance(f, And):
                return ev(f.left) and ev(f.right)
            if isinstance(f, Or):
                return ev(f.left) or ev(f.right)
            raise TypeError(f"unexpected matrix node: {f!r}")

        return ev(matrix)

    def rec(i, assignment):
        if i == len(prefix):
            return matrix_value(assignment)
        results = (
            rec(i + 1, {**assignment, variables[i]: d}) for d in domain
        )
        return all(results) if prefix[i] == "A" else any(results)

    return rec(0, {})


def _hf_members(x):
    return () if isinstance(x, int) else tuple(sorted(x, key=_hf_sort))


def _hf_sort(x):
    from .names import hf_key

    return hf_key(x)


def check_elementarity(M, ground_set, s, depth=3, ground_filter=None, sentences=None):
    """Compare ground and quotient structures sentence by sentence.

    Ground structure: the members of a transitive set with the name's
    interpretation as a unary predicate. Quotient structure: the classes
    below the embedded set with class membership in the name's class. With a
    ground filter smaller than the ultrafilter the structures may differ;
    the result is reported, not asserted.
    """
    if isinstance(ground_set, int):
        raise UltrapowerError("the ground structure needs a set, not an urelement")
    members = set(ground_set)
    for y in ground_set:
        for z in _hf_members(y):
            if z not in members:
                raise UltrapowerError("ground set must be transitive")
    g = ground_filter if ground_filter is not None else M.ultra
    predicate_value = interpret(s, g)
    domain_ground = sorted(ground_set, key=_hf_sort)

    def mem_ground(a, b):
        return not isinstance(b, int) and a in b

    def pred_ground(a):
        return not isinstance(predicate_value, int) and a in predicate_value

    j_set = M.class_of(check_name(frozenset(ground_set), M.forcing.top))
    domain_quot = M.elements_of(j_set)
    cls_s = M.class_of(s)

    def pred_quot(c):
        return M.mem(c, cls_s)

    sentences = sentences if sentences is not None else fo_sentences(depth)
    for sentence in sentences:
        a = _eval_fo(domain_ground, mem_ground, pred_ground, sentence)
        b = _eval_fo(domain_quot, M.mem, pred_quot, sentence)
        if a != b:
            return False
    return True


def missed_antichains(B, U):
    """Maximal antichains of the algebra not met by the ultrafilter.

    Maximal antichains of a finite algebra are the partitions of the atom
    set; the block containing the ultrafilter's atom is always met, so this
    is provably empty. Exposed as a guard against silent misuse.
    """
    atom = atom_of_ultrafilter(B, U)
    missed = []
    for partition in _set_partitions(sorted(B.atoms)):
        blocks = [frozenset(b) for b in partition]
        if not any(
            B.element_id(b) in U.members for b in blocks
        ):
            missed.append(blocks)  # unreachable: the block with `atom` is in U
    return missed


def _set_partitions(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1 :]
        yield [[first]] + part
