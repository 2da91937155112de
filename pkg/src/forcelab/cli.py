"""Command line interface.

Inputs referencing a poset accept a file path, a built-in fixture name
(CH2, FORK3, NSEP4, NWM5) or inline DSL text; names and formulas likewise
accept paths or inline text. Principle checks exit 0 when the principle
holds, 1 when it fails, and 2 on hypothesis or precondition errors.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

try:
    import tomllib
except ImportError:  # python 3.10
    import tomli as tomllib

from . import __version__
from .boolcomp import complete, ultrafilter_at
from .dsl import ParseError
from .names import (
    NameStructureError,
    hf_repr,
    interpret,
    is_check,
    is_kappa_small,
    is_lambda_bounded,
    name_to_dsl,
    parse_hf,
    parse_names,
    quasi_interpret,
    rank,
)
from .order import (
    FIXTURES,
    Filter,
    FilterError,
    PosetError,
    classify,
    enumerate_filters,
    generic_filters,
    is_separative,
    is_well_met,
    parse_poset,
    separative_quotient,
)
from .principles import (
    PrincipleError,
    check_FA,
    check_N,
    check_phi_N,
    check_simultaneous_N,
    hamkins_pipeline,
    parse_largeness,
)
from .semantics import (
    DEPTH_CAP,
    POSET_CAP,
    boolean_value,
    depth,
    forces,
    formula_to_text,
    parse_formula,
)
from .synth import (
    SynthError,
    family_for_formula,
    family_for_formula_bounded,
    family_guarantee_violations,
)
from .ultrapower import (
    UltrapowerError,
    UniverseSpec,
    build_quotient,
    check_los,
    check_trace_identity,
    embedding_j,
    missed_antichains,
)


class CliError(Exception):
    pass


def _read_source(arg, kind):
    """File path, fixture name, or inline text."""
    if kind == "poset" and arg in FIXTURES:
        return None
    if os.path.exists(arg):
        with open(arg, encoding="utf-8") as fh:
            return fh.read()
    head = {"poset": "poset", "names": "name", "formula": None}[kind]
    if head is None or arg.lstrip().startswith(head):
        return arg
    if kind == "formula":
        return arg
    raise CliError(f"no such file and not inline {kind} text: {arg!r}")


def load_poset(arg):
    if arg in FIXTURES:
        return FIXTURES[arg]
    return parse_poset(_read_source(arg, "poset"))


def load_names(arg, P):
    if not arg:
        return {}
    return parse_names(_read_source(arg, "names"), P)


def load_formula(arg):
    return parse_formula(_read_source(arg, "formula"))


def _enforce_caps(P=None, f=None, poset_cap=POSET_CAP, depth_cap=DEPTH_CAP):
    if P is not None and len(P.elements) > poset_cap:
        raise CliError(
            f"poset has {len(P.elements)} elements, beyond the cap {poset_cap}; "
            "raise --poset-cap to proceed"
        )
    if f is not None and depth(f) > depth_cap:
        raise CliError(
            f"formula depth {depth(f)} beyond the cap {depth_cap}; "
            "raise --depth-cap to proceed"
        )


def _filter_from(P, text):
    members = frozenset(t for t in text.replace(",", " ").split() if t)
    return Filter(P, members)


# -- poset commands -----------------------------------------------------------


def cmd_poset_check(args):
    P = load_poset(args.file)
    quotient, ids = separative_quotient(P)
    B = complete(P)
    print(f"poset {P.label}: {len(P.elements)} elements, top {P.top}")
    print("elements " + " ".join(P.elements))
    print("covers " + " ".join(f"{a}<{b}" for a, b in P.covers()))
    print(f"well-met {'yes' if is_well_met(P) else 'no'}")
    print(f"separative {'yes' if is_separative(P) else 'no'}")
    print(f"quotient-classes {len(quotient.elements)}")
    print(f"completion-atoms {len(B.atoms)}")
    if args.figure:
        from .report import save_hasse

        save_hasse(P, args.figure)
        print(f"figure {args.figure}")
    return 0


def cmd_poset_filters(args):
    P = load_poset(args.file)
    filters = enumerate_filters(P, include_empty=args.include_empty)
    generics = set(generic_filters(P))
    for f in filters:
        tag = " generic" if f in generics else ""
        print("{" + ",".join(f.sorted_members) + "}" + tag)
    print(f"total {len(filters)}")
    return 0


def cmd_complete(args):
    P = load_poset(args.file)
    B = complete(P)
    print(f"completion of {P.label}: {len(B.atoms)} atoms, {2 ** len(B.atoms)} elements")
    print("atoms " + " ".join(B.atoms))
    for p in P.elements:
        atoms = ",".join(sorted(B.embed[p]))
        print(f"embed {p} -> {{{atoms}}}")
    if args.figure:
        from .report import save_embedding

        save_embedding(B, args.figure)
        print(f"figure {args.figure}")
    return 0


# -- name commands ------------------------------------------------------------


def _pick_name(env, ident):
    if ident not in env:
        raise CliError(f"name {ident!r} not declared (have: {sorted(env)})")
    return env[ident]


def cmd_name_rank(args):
    P = load_poset(args.poset)
    s = _pick_name(load_names(args.names, P), args.name)
    print(f"rank {rank(s)}")
    print(f"empty {'yes' if s.is_empty else 'no'}")
    print(f"check-name {'yes' if is_check(s, P.top) else 'no'}")
    return 0


def cmd_name_classify(args):
    P = load_poset(args.poset)
    s = _pick_name(load_names(args.names, P), args.name)
    print(f"rank {rank(s)}")
    print(f"check-name {'yes' if is_check(s, P.top) else 'no'}")
    for n in (1, 2, 3):
        print(f"small({n}) {'yes' if is_kappa_small(s, n) else 'no'}")
    for m in (1, 2, 3):
        print(f"bounded({m}) {'yes' if is_lambda_bounded(s, m) else 'no'}")
    return 0


def cmd_name_interpret(args):
    P = load_poset(args.poset)
    s = _pick_name(load_names(args.names, P), args.name)
    g = _filter_from(P, args.filter)
    if args.quasi:
        print(f"quasi-interpretation {hf_repr(quasi_interpret(s, g))}")
    else:
        print(f"interpretation {hf_repr(interpret(s, g))}")
    return 0


# -- forcing commands -----------------------------------------------------------


def cmd_force(args):
    P = load_poset(args.poset)
    env = load_names(args.names, P)
    f = load_formula(args.formula)
    _enforce_caps(P, f, args.poset_cap, args.depth_cap)
    P.check_element(args.at)
    verdict = forces(P, args.at, f, env)
    print(f"forces {'yes' if verdict else 'no'}")
    return 0 if verdict else 1


def cmd_bval(args):
    P = load_poset(args.poset)
    env = load_names(args.names, P)
    f = load_formula(args.formula)
    _enforce_caps(P, f, args.poset_cap, args.depth_cap)
    B = complete(P)
    value = boolean_value(B, f, env)
    atoms = ",".join(sorted(value))
    print(f"value {{{atoms}}}" if value else "value 0")
    print(f"forced-by-top {'yes' if value == B.one else 'no'}")
    return 0


def cmd_synth(args):
    P = load_poset(args.poset)
    f = load_formula(args.formula)
    _enforce_caps(P, f, args.poset_cap, args.depth_cap)
    if args.bounded is not None:
        # the bounded variant lives on the completion; name conditions are
        # algebra element ids like a+b
        B = complete(P)
        ambient = B.as_poset()
        env = load_names(args.names, ambient)
        fam = family_for_formula_bounded(B, f, env, args.bounded)
    else:
        ambient = P
        env = load_names(args.names, P)
        fam = family_for_formula(P, f, env)
    print(f"family size {len(fam)} sets, {fam.total_conditions()} conditions")
    for cs, tag, bound in zip(fam.sets, fam.provenance, fam.bounds):
        extra = f" bound {bound}" if bound is not None else ""
        print(f"set [{tag}] {{{','.join(cs.sorted_members)}}} {cs.flavor}{extra}")
    if args.certify:
        bad = family_guarantee_violations(ambient, f, env, fam)
        if bad:
            for g in bad:
                print(f"violation {{{','.join(g.sorted_members)}}}")
            return 1
        print("certified: guarantee holds for every filter")
    return 0


# -- principle checks -------------------------------------------------------------


def _load_instance(path):
    with open(path, "rb") as fh:
        return tomllib.load(fh)


def _instance_poset(doc):
    spec = doc.get("poset", {})
    if "fixture" in spec:
        return FIXTURES[spec["fixture"]]
    if "file" in spec:
        with open(spec["file"], encoding="utf-8") as fh:
            return parse_poset(fh.read())
    if "inline" in spec:
        return parse_poset(spec["inline"])
    raise CliError("instance needs [poset] with fixture=, file= or inline=")


def cmd_check(args):
    doc = _load_instance(args.instance)
    kind = doc.get("kind", args.kind)
    if kind != args.kind:
        raise CliError(f"instance kind {kind!r} does not match subcommand {args.kind!r}")
    P = _instance_poset(doc)
    env = {}
    if "names" in doc:
        spec = doc["names"]
        text = spec.get("inline")
        if "file" in spec:
            with open(spec["file"], encoding="utf-8") as fh:
                text = fh.read()
        env = parse_names(text, P)
    section = doc.get(kind, {})
    if kind == "fa":
        dsets = [frozenset(d) for d in section["sets"]]
        L = parse_largeness(section.get("largeness", "ALL"))
        report = check_FA(P, dsets, L, require=section.get("require", "dense"))
    elif kind == "n":
        s = _pick_name(env, section["name"])
        value = parse_hf(section["value"])
        report = check_N(
            P,
            s,
            value,
            max_rank=section.get("max_rank"),
            small=section.get("small"),
            bounded=section.get("bounded"),
        )
    elif kind == "phi-n":
        s = _pick_name(env, section["name"])
        f = parse_formula(section["formula"])
        L = parse_largeness(section["largeness"])
        report = check_phi_N(P, s, f, L)
    elif kind == "sim-n":
        chosen = section.get("names")
        use = {v: env[v] for v in chosen} if chosen else env
        report = check_simultaneous_N(P, use, depth=section.get("depth", 2))
    elif kind == "hamkins":
        s = _pick_name(env, section["name"])
        L = parse_largeness(section["largeness"])
        report = hamkins_pipeline(P, s, L, m=section.get("m"))
    else:
        raise CliError(f"unknown principle kind {kind!r}")
    print(report.render())
    return report.exit_code


# -- ultrapower --------------------------------------------------------------------


def cmd_ultrapower(args):
    P = load_poset(args.poset)
    B = complete(P)
    M = None
    parts = [t for t in args.universe.split(",") if t != ""]
    if len(parts) < 3:
        raise CliError("--universe needs r,n,urelements like 2,2,0,1")
    spec = UniverseSpec(
        rank=int(parts[0]),
        small=int(parts[1]),
        base=tuple(sorted(int(t) for t in parts[2:])),
        weight=args.weight,
    )
    U = ultrafilter_at(B, args.ultrafilter)
    M = build_quotient(B, U, spec)
    print(f"universe {len(M.names)} names, {len(M)} classes (atom {args.ultrafilter})")
    PB = M.forcing
    for i, cls in enumerate(M.classes):
        print(f"class {i}: {name_to_dsl(cls[0], PB.top)} ({len(cls)} names)")
    for x in sorted(spec.base):
        print(f"j({x}) = class {embedding_j(M, x)}")
    jfull = embedding_j(M, frozenset(spec.base))
    print(f"j({hf_repr(frozenset(spec.base))}) = class {jfull}")
    from .semantics import canonical_formulas

    ok = 0
    total = 0
    for s in M.names[: args.los_sample]:
        for f in canonical_formulas(("s",), spec.base, max_depth=2):
            total += 1
            if check_los(M, f, {"s": s}):
                ok += 1
    print(f"los-agreement {ok}/{total}")
    from .names import is_rank1_over_base

    t_ok = sum(
        1
        for s in M.names
        if rank(s) <= 1 and is_rank1_over_base(s) and check_trace_identity(M, s)
    )
    t_all = sum(1 for s in M.names if rank(s) <= 1 and is_rank1_over_base(s))
    print(f"trace-identity {t_ok}/{t_all}")
    print(f"missed-antichains {len(missed_antichains(B, U))}")
    return 0 if ok == total and t_ok == t_all else 1


# -- suites ---------------------------------------------------------------------------


def _space_from(args):
    from .harness import InstanceSpace

    overrides = {}
    for item in args.space or ():
        if "=" not in item:
            raise CliError(f"--space expects key=value, got {item!r}")
        key, value = item.split("=", 1)
        key = key.strip()
        if key == "base":
            overrides[key] = tuple(sorted(int(t) for t in value.split("+")))
        elif key == "include_fixtures":
            overrides[key] = value.lower() in ("1", "true", "yes")
        else:
            overrides[key] = int(value)
    return InstanceSpace(**overrides)


def cmd_suite_run(args):
    from .harness import run_suite

    space = _space_from(args)
    report = run_suite(space, args.suite or None)
    print(report.render())
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        with open(os.path.join(args.out, "results.tsv"), "w", encoding="utf-8") as fh:
            fh.write("suite\tproperty\tinstances\tfailures\tmode\tseconds\n")
            for line in report.lines():
                fh.write(line + "\n")
        with open(os.path.join(args.out, "results.txt"), "w", encoding="utf-8") as fh:
            fh.write(report.render() + "\n")
        bundles = [
            ce for r in report.results for ce in r.counterexamples
        ]
        if bundles:
            with open(
                os.path.join(args.out, "counterexamples.json"), "w", encoding="utf-8"
            ) as fh:
                json.dump(bundles, fh, indent=2, sort_keys=True)
        from .report import save_poset_grid, save_suite_chart

        save_suite_chart(report, os.path.join(args.out, "suite_summary.png"))
        save_poset_grid(
            space.posets(), os.path.join(args.out, "poset_space.png")
        )
        print(f"written {args.out}/results.tsv results.txt suite_summary.png poset_space.png")
    return report.exit_code


def cmd_replay(args):
    from .harness import replay

    with open(args.bundle, encoding="utf-8") as fh:
        loaded = json.load(fh)
    bundles = loaded if isinstance(loaded, list) else [loaded]
    code = 0
    for bundle in bundles:
        fresh = replay(bundle)
        stored = {
            k: v for k, v in bundle.items() if k not in ("suite", "property")
        }
        if fresh is None:
            print(f"{bundle['property']}: NOT reproduced (instance now passes)")
            code = 1
        elif all(fresh.get(k) == v for k, v in stored.items()):
            print(f"{bundle['property']}: reproduced")
        else:
            print(f"{bundle['property']}: differs: {fresh}")
            code = 1
    return code


# -- parser -----------------------------------------------------------------------------


def build_parser():
    top = argparse.ArgumentParser(
        prog="forcelab",
        description="finite-scale workbench for forcing posets, names and principles",
    )
    top.add_argument("--version", action="version", version=f"forcelab {__version__}")
    sub = top.add_subparsers(dest="command", required=True)

    poset = sub.add_parser("poset", help="poset parsing and combinatorics")
    psub = poset.add_subparsers(dest="subcommand", required=True)
    pc = psub.add_parser("check", help="validate and describe a poset")
    pc.add_argument("file")
    pc.add_argument("--figure", help="write a Hasse diagram image")
    pc.set_defaults(fn=cmd_poset_check)
    pf = psub.add_parser("filters", help="list all filters")
    pf.add_argument("file")
    pf.add_argument("--include-empty", action="store_true")
    pf.set_defaults(fn=cmd_poset_filters)

    comp = sub.add_parser("complete", help="Boolean completion and embedding table")
    comp.add_argument("file")
    comp.add_argument("--figure", help="write the embedding table image")
    comp.set_defaults(fn=cmd_complete)

    name = sub.add_parser("name", help="name classification and interpretation")
    nsub = name.add_subparsers(dest="subcommand", required=True)
    for which, fn in (
        ("rank", cmd_name_rank),
        ("classify", cmd_name_classify),
        ("interpret", cmd_name_interpret),
    ):
        np = nsub.add_parser(which)
        np.add_argument("names", help="name declarations (file or inline)")
        np.add_argument("--poset", required=True)
        np.add_argument("--name", required=True)
        if which == "interpret":
            np.add_argument("--filter", required=True, help="members like '1,a'")
            np.add_argument("--quasi", action="store_true")
        np.set_defaults(fn=fn)

    force = sub.add_parser("force", help="decide p forces phi")
    bval = sub.add_parser("bval", help="Boolean value of a formula")
    for cmd, fn in ((force, cmd_force), (bval, cmd_bval)):
        cmd.add_argument("poset")
        cmd.add_argument("names", nargs="?", default="")
        cmd.add_argument("formula")
        cmd.add_argument("--poset-cap", type=int, default=POSET_CAP)
        cmd.add_argument("--depth-cap", type=int, default=DEPTH_CAP)
        cmd.set_defaults(fn=fn)
    force.add_argument("--at", required=True, help="the condition")

    synth = sub.add_parser("synth", help="synthesize a dense/predense family")
    synth.add_argument("--poset", required=True)
    synth.add_argument("--names", default="")
    synth.add_argument("--formula", required=True)
    synth.add_argument("--bounded", type=int, help="predense variant with this bound")
    synth.add_argument("--certify", action="store_true")
    synth.add_argument("--poset-cap", type=int, default=POSET_CAP)
    synth.add_argument("--depth-cap", type=int, default=DEPTH_CAP)
    synth.set_defaults(fn=cmd_synth)

    check = sub.add_parser("check", help="run a principle checker on an instance file")
    csub = check.add_subparsers(dest="kind", required=True)
    for kind in ("fa", "n", "phi-n", "sim-n", "hamkins"):
        cp = csub.add_parser(kind)
        cp.add_argument("instance", help="TOML instance file")
        cp.set_defaults(fn=cmd_check, kind=kind)

    up = sub.add_parser("ultrapower", help="build a quotient and report on it")
    up.add_argument("poset")
    up.add_argument("--ultrafilter", required=True, help="atom id")
    up.add_argument("--universe", default="2,2,0,1", help="r,n,urelements")
    up.add_argument("--weight", type=int, default=2)
    up.add_argument("--los-sample", type=int, default=24)
    up.set_defaults(fn=cmd_ultrapower)

    suite = sub.add_parser("suite", help="exhaustive property suites")
    ssub = suite.add_subparsers(dest="subcommand", required=True)
    sr = ssub.add_parser("run")
    sr.add_argument("--space", action="append", help="key=value, e.g. max_poset=4")
    sr.add_argument("--suite", action="append", help="suite name (repeatable)")
    sr.add_argument("--out", help="write results.tsv, figures and bundles here")
    sr.set_defaults(fn=cmd_suite_run)

    rp = sub.add_parser("replay", help="re-run a counterexample bundle")
    rp.add_argument("bundle")
    rp.set_defaults(fn=cmd_replay)
    return top


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (
        CliError,
        ParseError,
        PosetError,
        FilterError,
        NameStructureError,
        PrincipleError,
        SynthError,
        UltrapowerError,
        FileNotFoundError,
        KeyError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
