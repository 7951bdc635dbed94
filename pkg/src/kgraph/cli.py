"""Command-line front end.  Every subcommand prints one JSON report.

The exit status is 0 when the report passes, 1 when a check fails and 2
when the input could not be used.  Reports carry no timing unless
``--timing`` is given, so two runs with the same seed print the same bytes.
"""
import argparse
import json
import random
import sys
import time
from pathlib import Path as FilePath

from . import degree as dg
from .boundary import OmegaGraph, parse_boundary, random_boundary_path
from .core import load
from .errors import KGraphError, ParseError, UnknownCommand

COMMANDS = ("validate", "paths", "mce", "kp-check", "groupoid", "coe-check", "eventual-check",
            "stabilize", "stab-iso-check", "conjugacy-check", "aperiodicity")


# -- inputs ------------------------------------------------------------------------
def _read_json(path):
    p = FilePath(path)
    if not p.exists():
        from importlib import resources
        bundled = resources.files(__package__).joinpath("fixtures", p.name)
        if not bundled.is_file():
            raise ParseError(f"no such file {path!r}")
        text = bundled.read_text()
    else:
        text = p.read_text()
    try:
        return text, json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, location=f"{path}: line {exc.lineno} column {exc.colno}") from None


def load_graph(path):
    """A validated graph from a JSON file.  ``{"omega": k}`` gives Omega_{k,inf}.

    A name that is not an existing file is looked up among the bundled fixtures.
    """
    text, data = _read_json(path)
    if isinstance(data, dict) and "omega" in data:
        return OmegaGraph(int(data["omega"]))
    return load(text, name=FilePath(path).stem)


def _degree(text):
    try:
        return tuple(int(t) for t in text.split(","))
    except ValueError:
        raise ParseError(f"bad degree {text!r}") from None


def _json_degree(m):
    return ["inf" if t == dg.INF else t for t in m]


def _samples(args, g, rng):
    if args.samples_file:
        _, data = _read_json(args.samples_file)
        return [parse_boundary(g, s) for s in data]
    if isinstance(g, OmegaGraph):
        return [g.random_boundary_path(rng) for _ in range(args.samples)]
    return [random_boundary_path(g, rng) for _ in range(args.samples)]


def load_map(spec, g1, g2):
    """Build a boundary map from its JSON description."""
    from .equivalences import (
        IdentityMap, NBijection, OmegaBijection, PrefixTable, alternating_flip, same_skeleton_homeo,
    )
    kind = spec.get("kind")
    if kind == "omega":
        return OmegaBijection(NBijection.from_name(spec.get("phi", "graded-lex"), g1.rank, g2.rank))
    if kind == "identity":
        return IdentityMap(g1)
    if kind == "relabel":
        return PrefixTable.relabeling(g1, g2, spec["edges"])
    if kind == "same-skeleton":
        return same_skeleton_homeo(g1, g2)
    if kind == "alternating-flip":
        return alternating_flip(g1)
    raise ParseError(f"unknown map kind {kind!r}")


def load_family(spec, h, g1, g2):
    """A cocycle family: a named rule, or cylinder tables for f, g and optionally i, j."""
    from .equivalences import CocycleFamily, CylinderTable
    rule = spec.get("rule")
    if rule == "omega":
        phi = h.phi
        return CocycleFamily(
            f=lambda m, x: phi(x.point),
            g=lambda m, x: phi(dg.add(x.point, m)),
            i=lambda n, y: phi.inverse(y.point),
            j=lambda n, y: phi.inverse(dg.add(y.point, n)),
        )
    if rule == "conjugacy":
        return CocycleFamily.conjugacy(g1.rank)
    if rule == "zero":
        return CocycleFamily.zero(g1.rank, g2.rank)
    if rule is not None:
        raise ParseError(f"unknown family rule {rule!r}")
    tables = {}
    for key, graph in (("f", g1), ("g", g1), ("i", g2), ("j", g2)):
        if key in spec:
            tables[key] = CylinderTable.from_json(graph, spec[key])
    if "f" not in tables or "g" not in tables:
        raise ParseError("a family file needs tables for f and g")
    return CocycleFamily(tables["f"], tables["g"], tables.get("i"), tables.get("j"))


def _map_and_family(args, g1, g2):
    _, spec = _read_json(args.map) if args.map else (None, {"kind": "identity"})
    h = load_map(spec, g1, g2)
    if args.family:
        _, fam = _read_json(args.family)
    else:
        fam = {"rule": "omega" if spec.get("kind") == "omega" else "conjugacy"}
    return h, load_family(fam, h, g1, g2)


def load_code(spec, g1, g2):
    """A block code and optional partition rows from JSON."""
    from .stab import BlockCode, Partition, equivalence_classes
    if spec.get("kind") == "relabel":
        code = BlockCode.relabeling(g1, g2, spec["edges"])
    elif spec.get("kind") == "identity":
        code = BlockCode.identity(g1)
    else:
        k = g1.rank
        window = tuple(spec.get("window", dg.ones(k)))
        memory = tuple(spec.get("memory", dg.zero(k)))
        table = {g1.path(a): g2.path(b) for a, b in spec["table"].items()}
        code = BlockCode(g1, g2, window, memory, table)
    partition = None
    if "partition" in spec:
        rows = [(g1.path(lam), r, m) for lam, r, m in spec["partition"]]
        partition = Partition(equivalence_classes(code), rows)
    return code, partition


# -- subcommands ----------------------------------------------------------------------
def cmd_validate(args):
    g = load_graph(args.graph)
    if isinstance(g, OmegaGraph):
        return {"pass": True, "rank": g.rank, "omega": True}
    return {"pass": True, "rank": g.rank, "vertices": len(g.vertices), "edges": len(g.edges),
            "properties": g.properties()}


def cmd_paths(args):
    g = load_graph(args.graph)
    n = _degree(args.degree) if args.degree else dg.scale(args.depth, dg.ones(g.rank))
    verts = [args.vertex] if args.vertex else list(g.vertices)
    out = {v: [str(lam) for lam in g.paths(v, n)] for v in verts}
    return {"pass": True, "degree": list(n), "paths": out}


def cmd_mce(args):
    g = load_graph(args.graph)
    lam, mu = g.path(args.lam), g.path(args.mu)
    return {"pass": True, "mce": [str(p) for p in g.mce(lam, mu)],
            "lambda_min": [[str(a), str(b)] for a, b in g.lambda_min(lam, mu)]}


def cmd_kp_check(args):
    from .steinberg import ring_from_name, verify_kp
    g = load_graph(args.graph)
    rep = verify_kp(g, ring_from_name(args.ring), args.depth, raise_on_failure=False)
    return {"pass": all(r["status"] == "pass" for r in rep.values()),
            "ring": args.ring, "depth": args.depth, "relations": rep}


def cmd_groupoid(args):
    from .groupoid import groupoid_suite
    g = load_graph(args.graph)
    return groupoid_suite(g, args.samples, depth=args.depth, seed=args.seed)


def cmd_coe_check(args):
    from .equivalences import check_coe, check_period_preserving
    g1, g2 = load_graph(args.graph1), load_graph(args.graph2)
    h, fam = _map_and_family(args, g1, g2)
    samples = _samples(args, g1, random.Random(args.seed))
    degrees = list(dg.box((args.depth,) * g1.rank))
    coe = check_coe(h, fam, samples, degrees, depth=args.depth)
    per = check_period_preserving(h, fam, samples, args.depth)
    return {"pass": coe["pass"] and per["pass"], "coe": coe, "period": per}


def cmd_eventual_check(args):
    from .equivalences import check_eventual_conjugacy
    g1, g2 = load_graph(args.graph1), load_graph(args.graph2)
    h, fam = _map_and_family(args, g1, g2)
    if not args.family:
        fam = None
    samples = _samples(args, g1, random.Random(args.seed))
    return check_eventual_conjugacy(h, fam, samples, list(dg.box((args.depth,) * g1.rank)))


def cmd_stabilize(args):
    from .stab import StabKGraph
    g = load_graph(args.graph)
    s = StabKGraph(g)
    rng = random.Random(args.seed)
    tail = _degree(args.tail) if args.tail else dg.zero(g.rank)
    if args.point:
        points = [s.point(parse_boundary(g, args.point), tail)]
    else:
        points = [s.random_boundary_path(rng) for _ in range(args.samples)]
    return {"pass": True, "graph": s.name, "rank": s.rank,
            "points": [{"path": str(z), "degree": _json_degree(z.degree),
                        "range": [z.range[0], list(z.range[1])]}
                       for z in points]}


def cmd_stab_iso_check(args):
    from .stab import stab_iso_suite
    g = load_graph(args.graph)
    return stab_iso_suite(g, args.samples, depth=args.depth, seed=args.seed)


def cmd_conjugacy_check(args):
    from .stab import conjugacy_suite
    g1, g2 = load_graph(args.graph1), load_graph(args.graph2)
    _, spec = _read_json(args.code)
    code, partition = load_code(spec, g1, g2)
    return conjugacy_suite(code, args.samples, depth=args.depth, seed=args.seed,
                           partition=partition)


def cmd_aperiodicity(args):
    from .equivalences import is_aperiodic
    g = load_graph(args.graph)
    v = is_aperiodic(g, args.depth)
    witness = v.witness if isinstance(v.witness, (dict, list, str, type(None))) else str(v.witness)
    return {"pass": True, "verdict": v.status, "depth": v.depth, "witness": witness}


# -- parser -------------------------------------------------------------------------
def _parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--depth", type=int, default=3)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--ring", default="z")
    common.add_argument("--samples", type=int, default=20)
    common.add_argument("--timing", action="store_true", help="add elapsed seconds to the report")

    parser = argparse.ArgumentParser(prog="kgraph", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, *graphs, help=None):
        p = sub.add_parser(name, parents=[common], help=help)
        for gname in graphs:
            p.add_argument(gname)
        p.set_defaults(func=func)
        return p

    add("validate", cmd_validate, "graph", help="load a graph and report its properties")
    p = add("paths", cmd_paths, "graph", help="list the paths of one degree")
    p.add_argument("--vertex")
    p.add_argument("--degree", help="comma separated, e.g. 1,2")
    p = add("mce", cmd_mce, "graph", help="minimal common extensions of two paths")
    p.add_argument("lam")
    p.add_argument("mu")
    add("kp-check", cmd_kp_check, "graph", help="verify the Kumjian-Pask relations")
    add("groupoid", cmd_groupoid, "graph", help="groupoid laws on sampled arrows")
    for name, func, what in (
            ("coe-check", cmd_coe_check, "continuous orbit equivalence of a map and cocycles"),
            ("eventual-check", cmd_eventual_check, "eventual one-sided conjugacy of a map")):
        p = add(name, func, "graph1", "graph2", help=what)
        p.add_argument("--map", help="map description (JSON)")
        p.add_argument("--family", help="cocycle family (JSON)")
        p.add_argument("--samples-file", help="boundary path literals (JSON list)")
    p = add("stabilize", cmd_stabilize, "graph", help="points of the stabilised graph")
    p.add_argument("--point", help="boundary path literal")
    p.add_argument("--tail", help="Omega coordinate, comma separated")
    add("stab-iso-check", cmd_stab_iso_check, "graph", help="check the stabilisation isomorphism")
    p = add("conjugacy-check", cmd_conjugacy_check, "graph1", "graph2",
            help="check a block code and the groupoid isomorphism it induces")
    p.add_argument("--code", required=True, help="block code description (JSON)")
    add("aperiodicity", cmd_aperiodicity, "graph", help="depth-qualified aperiodicity verdict")
    return parser


def run(argv):
    """Run one command.  Returns (report, exit status)."""
    argv = list(argv)
    first = next((a for a in argv if not a.startswith("-")), None)
    try:
        if first is not None and first not in COMMANDS:
            raise UnknownCommand(f"unknown subcommand {first!r}")
        args = _parser().parse_args(argv)
        start = time.perf_counter()
        report = args.func(args)
        report = {"command": args.command, **report}
        if args.timing:
            report["seconds"] = round(time.perf_counter() - start, 3)
        return report, 0 if report["pass"] else 1
    except (KGraphError, KeyError, ValueError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else str(exc)
        err = {"type": type(exc).__name__, "message": str(msg)}
        loc = getattr(exc, "location", None)
        if loc is not None:
            err["location"] = loc
        return {"command": first, "pass": False, "error": err}, 2


def main(argv=None):
    report, status = run(sys.argv[1:] if argv is None else argv)
    print(json.dumps(report, sort_keys=True, indent=2, default=str, allow_nan=False))
    return status


if __name__ == "__main__":
    sys.exit(main())
