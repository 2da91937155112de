"""Independent brute-force oracles used to freeze expected values.

Everything here is deliberately naive (subset scans, permutation searches)
and shares no code paths with the package implementations it checks.
"""

import itertools


def subsets(items):
    items = sorted(items)
    for r in range(len(items) + 1):
        yield from (frozenset(c) for c in itertools.combinations(items, r))


def is_filter_members(P, S):
    """Raw filter axioms: upward closed + any two members bounded inside."""
    for m in S:
        for q in P.elements:
            if P.leq(m, q) and q not in S:
                return False
    for p, q in itertools.combinations(sorted(S), 2):
        if not any(P.leq(r, p) and P.leq(r, q) for r in S):
            return False
    return True


def naive_filters(P, include_empty=True):
    """All filters of P by scanning every subset of the elements."""
    out = []
    for S in subsets(P.elements):
        if not S and not include_empty:
            continue
        if is_filter_members(P, S):
            out.append(S)
    out.sort(key=lambda s: (len(s), tuple(sorted(s))))
    return out


def naive_compatible(P, p, q):
    return any(P.leq(r, p) and P.leq(r, q) for r in P.elements)


def naive_dense(P, S):
    return all(any(P.leq(s, p) for s in S) for p in P.elements)


def naive_predense(P, S):
    return all(any(naive_compatible(P, s, p) for s in S) for p in P.elements)


def naive_separative_classes(P):
    """Partition of the elements by mutual separative-preorder relation."""

    def pre(p, q):
        return all(naive_compatible(P, r, q) for r in P.elements if P.leq(r, p))

    classes = []
    seen = set()
    for p in P.elements:
        if p in seen:
            continue
        cls = frozenset(q for q in P.elements if pre(p, q) and pre(q, p))
        seen |= cls
        classes.append(cls)
    return sorted(classes, key=lambda c: tuple(sorted(c)))


def naive_posets_with_top(n):
    """All partial orders with a maximum on n labeled points, up to iso.

    Enumerates every subset of the strict pairs, keeps the transitive
    antisymmetric ones with a unique maximum, and dedups by permutation
    search. Returns canonical relation matrices (frozensets of index pairs,
    reflexive closure included).
    """
    idx = list(range(n))
    strict_pairs = [(i, j) for i in idx for j in idx if i != j]
    found = set()
    for bits in itertools.product([0, 1], repeat=len(strict_pairs)):
        rel = {p for p, b in zip(strict_pairs, bits) if b}
        ok = True
        for (a, b) in rel:
            if (b, a) in rel:
                ok = False
                break
        if not ok:
            continue
        for (a, b) in rel:
            for (c, d) in rel:
                if b == c and (a, d) not in rel:
                    ok = False
                    break
            if not ok:
                break
        if not ok:
            continue
        full = rel | {(i, i) for i in idx}
        maxima = [e for e in idx if all((x, e) in full for x in idx)]
        if len(maxima) != 1:
            continue
        canon = min(
            tuple(sorted((perm[a], perm[b]) for (a, b) in full))
            for perm in itertools.permutations(idx)
        )
        found.add(canon)
    return sorted(found)


def naive_interpret(name, members):
    """Recursive interpretation done directly on the name structure."""
    if name.leaf is not None:
        return name.leaf
    return frozenset(
        naive_interpret(child, members)
        for (child, p) in name.entries
        if p in members
    )


def generic_truth(P, formula_eval, ground_env_fn):
    """Evaluate a closed fact in every atom-generated filter; see semantics tests."""
    from forcelab.order import generic_filters

    return [formula_eval(ground_env_fn(G)) for G in generic_filters(P)]
