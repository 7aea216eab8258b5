"""``heegaard-fill`` command-line front end.

Exit codes: 0 success, 2 bad input or bouquet, 3 unmet precondition,
4 file-system trouble.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from pathlib import Path
from typing import Sequence

from . import analysis
from .errors import HeegaardFillError, InputError, MalformedTable
from .filler import Strategy, fill
from .fixtures import ehugabdes
from .moves import ConstructionLog, LoggedTriangulation, build_minimal_layered_handlebody
from .tri_kernel import (
    Triangulation3,
    canonical_signature,
    dual_multigraph,
    format_gluing_table,
    h1,
    parse_gluing_table,
    status,
    triangulation_from_json,
    triangulation_to_json,
    vertex_link,
)

EXIT_IO = 4


class IOFailure(HeegaardFillError):
    exit_code = EXIT_IO


# ---------------------------------------------------------------------------
# Loading and saving
# ---------------------------------------------------------------------------


def load_source(source: str) -> LoggedTriangulation:
    """A fixture name, a gluing-table file or a JSON file (optionally with a log)."""
    if source == "eHuGabdes-table":
        return LoggedTriangulation.seeded(ehugabdes())
    m = re.fullmatch(r"handlebody-g(\d+)", source)
    if m:
        return build_minimal_layered_handlebody(int(m.group(1)))
    try:
        text = Path(source).read_text()
    except OSError as err:
        raise IOFailure(f"cannot read {source}: {err.strerror or err}") from err
    if not text.strip():
        raise MalformedTable(f"{source} is empty")
    if text.lstrip().startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as err:
            raise MalformedTable(f"{source}: {err}") from err
        tri = triangulation_from_json(data.get("triangulation", data))
        if "log" in data:
            return LoggedTriangulation(tri, ConstructionLog.from_json(data["log"]))
        return LoggedTriangulation.seeded(tri)
    return LoggedTriangulation.seeded(parse_gluing_table(text))


def render(lt: LoggedTriangulation, fmt: str) -> str:
    if fmt == "json":
        return json.dumps({"triangulation": triangulation_to_json(lt.tri),
                           "log": lt.log.to_json()}, indent=2) + "\n"
    return format_gluing_table(lt.tri)


def write_text(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text)
    except OSError as err:
        raise IOFailure(f"cannot write {path}: {err.strerror or err}") from err


def parse_int_list(text: str | None) -> list[int]:
    if not text:
        return []
    try:
        return [int(x) for x in re.split(r"[,\s]+", text.strip()) if x]
    except ValueError as err:
        raise InputError(f"expected comma-separated integers, got {text!r}") from err


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_build(args) -> int:
    lt = build_minimal_layered_handlebody(args.genus)
    write_text(args.out, render(lt, args.format))
    return 0


def cmd_fill(args) -> int:
    lt = load_source(args.source)
    if args.bouquet:
        try:
            data = json.loads(Path(args.bouquet).read_text())
        except OSError as err:
            raise IOFailure(f"cannot read {args.bouquet}: {err.strerror or err}") from err
        except json.JSONDecodeError as err:
            raise InputError(f"{args.bouquet}: {err}") from err
        weights, resolved = data["weights"], data.get("resolved", [])
    else:
        weights, resolved = parse_int_list(args.weights), parse_int_list(args.resolved)
    result = fill(lt, weights, resolved, args.strategy)
    write_text(args.out, render(result.state.lt, args.format))
    report = json.dumps(result.report, indent=2) + "\n"
    if args.report:
        write_text(args.report, report)
    elif args.out not in (None, "-"):
        sys.stdout.write(report)
    return 0


def invariants_report(tri: Triangulation3) -> dict:
    sk = tri.skeleton
    st = status(tri)
    report = {
        "status": st.as_dict(),
        "tetrahedra": tri.size,
        "vertices": sk.num_vertices,
        "edges": sk.num_edges,
        "boundary_edges": len(sk.boundary_edges),
        "triangles": sk.num_triangles,
        "boundary_faces": tri.boundary.num_faces,
        "boundary_genus": [c.genus for c in tri.boundary.components],
        "links": [],
        "h1": str(h1(tri)) if st.is_valid else None,
        "signature": canonical_signature(tri),
    }
    for v in range(sk.num_vertices):
        link = vertex_link(tri, v)
        report["links"].append({"genus": link.genus, "boundary_circles": link.boundary_circles,
                                "orientable": link.orientable, "euler": link.euler})
    g = dual_multigraph(tri)
    report["dual_graph"] = {"vertices": g.num_vertices, "edges": len(g.edges), "loops": len(g.loops)}
    return report


def _summary_line(rep: dict) -> str:
    st = rep["status"]
    words = ["valid" if st["isValid"] else "invalid",
             "closed" if st["isClosed"] else "bounded"]
    if rep["boundary_genus"]:
        words.append("boundary genus " + "/".join(map(str, rep["boundary_genus"])))
    words.append(f"{rep['edges']} edges")
    if rep["h1"] is not None:
        words.append(f"h1 = {rep['h1']}")
    return ", ".join(words)


def cmd_invariants(args) -> int:
    rep = invariants_report(load_source(args.source).tri)
    if args.format == "json":
        write_text(None, json.dumps(rep, indent=2) + "\n")
    else:
        lines = [_summary_line(rep)]
        lines += [f"{k}: {rep[k]}" for k in ("tetrahedra", "vertices", "triangles",
                                            "boundary_faces", "signature")]
        for v, link in enumerate(rep["links"]):
            lines.append(f"vertex {v} link: genus {link['genus']}, "
                         f"{link['boundary_circles']} boundary circles")
        d = rep["dual_graph"]
        lines.append(f"dual graph: {d['vertices']} nodes, {d['edges']} edges, {d['loops']} loops")
        write_text(None, "\n".join(lines) + "\n")
    return 0


def cmd_census(args) -> int:
    if args.source:
        tri = load_source(args.source).tri
    elif args.genus == 2:
        tri = ehugabdes()
    else:
        tri = build_minimal_layered_handlebody(args.genus).tri
    records = analysis.enumerate_census(tri, args.max_weight, args.strategy, workers=args.workers)
    if args.out in (None, "-"):
        summary = analysis.write_census_csv(records, sys.stdout)
    else:
        try:
            with open(args.out, "w", newline="") as fh:
                summary = analysis.write_census_csv(records, fh)
        except OSError as err:
            raise IOFailure(f"cannot write {args.out}: {err.strerror or err}") from err
    out = summary.as_dict()
    if args.format == "json":
        sys.stderr.write(json.dumps(out, indent=2) + "\n")
    else:
        sys.stderr.write(
            f"{out['filled']} valid of {out['records']} inputs; "
            f"{out['distinct_signatures']} distinct signatures; "
            f"h1 {out['distinct_h1']}; max order width {out['max_order_width']}\n")
    return 0


def cmd_cutwidth(args) -> int:
    lt = load_source(args.source)
    rep: dict = {"tetrahedra": lt.tri.size}
    ow = analysis.order_width(lt.tri, lt.log.order)
    rep["order_width"] = ow.width
    rep["cutsets"] = list(ow.cutsets)
    if args.exact:
        rep["exact_cutwidth"] = analysis.exact_cutwidth(dual_multigraph(lt.tri))
    if args.format == "json":
        write_text(None, json.dumps(rep, indent=2) + "\n")
    else:
        lines = [f"order width: {rep['order_width']}"]
        if "exact_cutwidth" in rep:
            lines.append(f"exact cutwidth: {rep['exact_cutwidth']}")
        write_text(None, "\n".join(lines) + "\n")
    if args.dot:
        write_text(args.dot, dual_multigraph(lt.tri).to_dot())
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="heegaard-fill",
                                     description="Fill handlebody triangulations along rooted bouquets.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("table", "json"), default="table")
    sub = parser.add_subparsers(dest="command", required=True)

    def positive(text: str) -> int:
        value = int(text)
        if value < 1:
            raise argparse.ArgumentTypeError("must be at least 1")
        return value

    p = sub.add_parser("build", parents=[common], help="minimal layered handlebody")
    p.add_argument("--genus", type=positive, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("fill", parents=[common], help="fill along a filling bouquet")
    p.add_argument("source", help="table/JSON file or fixture name")
    p.add_argument("--weights")
    p.add_argument("--resolved")
    p.add_argument("--bouquet", help="JSON file with weights and resolved edges")
    p.add_argument("--strategy", choices=[s.value for s in Strategy], default="greedy")
    p.add_argument("--out")
    p.add_argument("--report")
    p.set_defaults(func=cmd_fill)

    p = sub.add_parser("invariants", parents=[common], help="status, links, homology and signature")
    p.add_argument("source")
    p.set_defaults(func=cmd_invariants)

    p = sub.add_parser("census", parents=[common], help="fill every bouquet up to a total weight")
    p.add_argument("source", nargs="?")
    p.add_argument("--genus", type=positive, default=2,
                   help="seed when no source is given; genus 2 uses eHuGabdes-table")
    p.add_argument("--max-weight", type=int, required=True)
    p.add_argument("--strategy", choices=[s.value for s in Strategy], default="greedy")
    p.add_argument("--workers", type=positive, default=1)
    p.add_argument("--out")
    p.set_defaults(func=cmd_census)

    p = sub.add_parser("cutwidth", parents=[common], help="order width and exact cutwidth of the dual graph")
    p.add_argument("source")
    p.add_argument("--exact", action="store_true")
    p.add_argument("--dot", help="write the dual graph in DOT format")
    p.set_defaults(func=cmd_cutwidth)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except HeegaardFillError as err:
        print(f"error: {err}", file=sys.stderr)
        return err.exit_code
    except KeyError as err:
        print(f"error: missing field {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
