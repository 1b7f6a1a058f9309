"""Command-line front end.

Subcommands mirror the pipeline stages so each is independently
scriptable through the JSON artifacts:

    gen-layout, gen-hotspots, build-graph, detect, cover, decompose,
    verify, run, experiment, render

Technology parameters resolve as defaults < JSON config file < explicit
flags. The config file comes from --tech, or from $DSAMP_CONFIG when the
flag is absent. Exit code 0 on success, 1 on any stage error, 2 on bad
arguments.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import replace

from .cover import CoverResult, CoverStats, apply_eliminators, greedy_cover
from .decompose import (SolveMode, decompose, load_decomposition, save_decomposition)
from .graph import build_graph
from .hotspots import gen_random_patterns, load_library, save_library
from .layout import gen_random_layout, load_layout, save_layout
from .matcher import Eliminator, enumerate_eliminators, find_potential_hotspots, \
    matches_to_json_dict
from .pipeline import (ExperimentConfig, GeneratorSpec, PipelineError, RunConfig,
                       format_experiment, run_experiment, run_pipeline)
from .render import render_svg
from .tech import TechParams, load_tech
from .verify import save_report, verify

CONFIG_ENV = "DSAMP_CONFIG"


def _write_json(path: str, data: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _add_tech_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--tech", help="tech parameter JSON file "
                        f"(default: ${CONFIG_ENV} when set)")
    parser.add_argument("--masks", type=int, help="number of masks")
    parser.add_argument("--max-g", type=int, help="maximum DSA group size")


def _resolve_tech(args: argparse.Namespace) -> TechParams:
    path = args.tech or os.environ.get(CONFIG_ENV)
    tech = load_tech(path) if path else TechParams()
    overrides = {}
    if getattr(args, "masks", None) is not None:
        overrides["num_masks"] = args.masks
    if getattr(args, "max_g", None) is not None:
        overrides["max_g"] = args.max_g
    return replace(tech, **overrides) if overrides else tech


def _cmd_gen_layout(args) -> int:
    tech = _resolve_tech(args)
    layout = gen_random_layout(args.seed, args.rows, args.cols, args.pitch_x,
                               args.pitch_y, args.density, tech)
    save_layout(layout, args.out, args.format)
    print(f"wrote {len(layout)} vias to {args.out}")
    return 0


def _cmd_gen_hotspots(args) -> int:
    tech = _resolve_tech(args)
    library = gen_random_patterns(args.seed, rows=args.rows, cols=args.cols,
                                  cell_pitch_x=args.cell_pitch_x,
                                  cell_pitch_y=args.cell_pitch_y,
                                  count=args.count, tech=tech)
    save_library(library, args.out)
    print(f"wrote {len(library.patterns)} patterns to {args.out}")
    return 0


def _cmd_build_graph(args) -> int:
    tech = _resolve_tech(args)
    layout = load_layout(args.layout)
    graph = build_graph(layout, tech)
    _write_json(args.out, graph.to_json_dict())
    print(f"{len(graph.conflict_edges)} conflict edges, "
          f"{len(graph.group_edges)} group edges, "
          f"{len(graph.components)} components -> {args.out}")
    return 0


def _cmd_detect(args) -> int:
    tech = _resolve_tech(args)
    layout = load_layout(args.layout)
    library = load_library(args.library, tech)
    graph = build_graph(layout, tech)
    phs = find_potential_hotspots(layout, library, graph, threads=args.threads)
    eliminators = enumerate_eliminators(phs, graph)
    _write_json(args.out, matches_to_json_dict(phs, eliminators))
    print(f"{len(phs)} potential hotspots, {len(eliminators)} candidates -> {args.out}")
    return 0


def _cmd_cover(args) -> int:
    tech = _resolve_tech(args)
    layout = load_layout(args.layout)
    library = load_library(args.library, tech)
    graph = build_graph(layout, tech)
    phs = find_potential_hotspots(layout, library, graph, threads=args.threads)
    eliminators = enumerate_eliminators(phs, graph)
    result = greedy_cover(phs, eliminators)
    _write_json(args.out, result.to_json_dict())
    print(f"chose {len(result.chosen)} eliminators, "
          f"{len(result.covered)} covered, {len(result.residual)} residual -> {args.out}")
    return 0


def _load_cover_result(path: str) -> CoverResult:
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    chosen = tuple(Eliminator(id=e["id"], kind=e["kind"], vias=tuple(e["vias"]),
                              covers=frozenset(), state="chosen")
                   for e in data["chosen"])
    stats = data.get("stats", {})
    return CoverResult(chosen=chosen,
                       covered=frozenset(data.get("covered", [])),
                       residual=frozenset(data.get("residual", [])),
                       stats=CoverStats(stats.get("iterations", 0),
                                        stats.get("invalidations", 0),
                                        stats.get("relocations", 0),
                                        stats.get("sum_covers", 0)))


def _cmd_decompose(args) -> int:
    tech = _resolve_tech(args)
    layout = load_layout(args.layout)
    graph = build_graph(layout, tech)
    library = load_library(args.library, tech) if args.library else None
    if args.cover:
        graph = apply_eliminators(graph, _load_cover_result(args.cover))
    mode = SolveMode(hotspot_aware=args.mode == "aware", exact_limit=args.exact_limit)
    decomposition = decompose(graph, tech, library if mode.hotspot_aware else None,
                              mode, threads=args.threads)
    save_decomposition(decomposition, args.out)
    print(f"{len(decomposition.groups)} groups "
          f"({decomposition.exact_components} exact, "
          f"{decomposition.fallback_components} fallback components) -> {args.out}")
    return 0


def _cmd_verify(args) -> int:
    tech = _resolve_tech(args)
    layout = load_layout(args.layout)
    library = load_library(args.library, tech) if args.library else None
    decomposition = load_decomposition(args.decomposition)
    report = verify(layout, decomposition, tech, library)
    save_report(report, args.out)
    print(report.summary())
    return 0


def _cmd_run(args) -> int:
    tech = _resolve_tech(args)
    layout_gen = None
    if args.layout is None:
        layout_gen = GeneratorSpec(rows=args.gen_rows, cols=args.gen_cols,
                                   pitch_x=args.gen_pitch_x, pitch_y=args.gen_pitch_y,
                                   density=args.gen_density)
    config = RunConfig(layout_path=args.layout, library_path=args.library,
                       layout_gen=layout_gen, library_patterns=args.gen_patterns,
                       tech=tech, mode=args.mode, exact_limit=args.exact_limit,
                       threads=args.threads, seed=args.seed, out_dir=args.out_dir,
                       svg=args.svg, dump_graph=args.dump_graph,
                       dump_matches=args.dump_matches)
    result = run_pipeline(config)
    print(result.report.summary())
    print(f"artifacts in {args.out_dir}")
    return 0


def _cmd_experiment(args) -> int:
    tech = _resolve_tech(args)
    cfg = ExperimentConfig(
        replications=args.replications, seed=args.seed, tech=tech,
        size_min=args.size_min, size_max=args.size_max,
        pitch_x=args.gen_pitch_x, pitch_y=args.gen_pitch_y,
        library_patterns=args.gen_patterns, min_structures=args.min_structures,
        exact_limit=args.exact_limit)
    result = run_experiment(cfg, out_dir=args.out_dir)
    print(format_experiment(result), end="")
    return 0


def _cmd_render(args) -> int:
    tech = _resolve_tech(args)
    layout = load_layout(args.layout)
    decomposition = load_decomposition(args.decomposition)
    library = load_library(args.library, tech) if args.library else None
    report = None
    if args.report:
        report = verify(layout, decomposition, tech, library)
    render_svg(layout, decomposition, tech, report, library, args.out)
    print(f"wrote {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dsamp",
        description="Hotspot-aware DSA grouping and multiple-patterning "
                    "mask assignment for via layouts")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-layout", help="generate a random gridded layout")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--rows", type=int, default=40)
    p.add_argument("--cols", type=int, default=40)
    p.add_argument("--pitch-x", type=int, default=70)
    p.add_argument("--pitch-y", type=int, default=45)
    p.add_argument("--density", type=float, default=0.4)
    p.add_argument("--format", choices=("json", "csv"), default=None)
    p.add_argument("--out", required=True)
    _add_tech_flags(p)
    p.set_defaults(func=_cmd_gen_layout)

    p = sub.add_parser("gen-hotspots", help="generate a random hotspot library")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--rows", type=int, default=4)
    p.add_argument("--cols", type=int, default=2)
    p.add_argument("--cell-pitch-x", type=int, default=70)
    p.add_argument("--cell-pitch-y", type=int, default=45)
    p.add_argument("--count", type=int, default=36)
    p.add_argument("--out", required=True)
    _add_tech_flags(p)
    p.set_defaults(func=_cmd_gen_hotspots)

    p = sub.add_parser("build-graph", help="dump the hybrid hypergraph as JSON")
    p.add_argument("--layout", required=True)
    p.add_argument("--out", required=True)
    _add_tech_flags(p)
    p.set_defaults(func=_cmd_build_graph)

    p = sub.add_parser("detect", help="dump potential hotspots and eliminator candidates")
    p.add_argument("--layout", required=True)
    p.add_argument("--library", required=True)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out", required=True)
    _add_tech_flags(p)
    p.set_defaults(func=_cmd_detect)

    p = sub.add_parser("cover", help="run the greedy cover and dump its result")
    p.add_argument("--layout", required=True)
    p.add_argument("--library", required=True)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out", required=True)
    _add_tech_flags(p)
    p.set_defaults(func=_cmd_cover)

    p = sub.add_parser("decompose", help="group vias and assign masks")
    p.add_argument("--layout", required=True)
    p.add_argument("--library", help="hotspot library (aware mode)")
    p.add_argument("--cover", help="cover.json whose chosen eliminators to apply")
    p.add_argument("--mode", choices=("aware", "unaware"), default="unaware")
    p.add_argument("--exact-limit", type=int, default=14)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--out", required=True)
    _add_tech_flags(p)
    p.set_defaults(func=_cmd_decompose)

    p = sub.add_parser("verify", help="audit a decomposition")
    p.add_argument("--layout", required=True)
    p.add_argument("--library")
    p.add_argument("--decomposition", required=True)
    p.add_argument("--out", required=True)
    _add_tech_flags(p)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("run", help="full pipeline into an output directory")
    p.add_argument("--layout", help="layout file, else a layout is generated")
    p.add_argument("--library", help="library file, else a library is generated")
    p.add_argument("--gen-rows", type=int, default=40)
    p.add_argument("--gen-cols", type=int, default=40)
    p.add_argument("--gen-pitch-x", type=int, default=70)
    p.add_argument("--gen-pitch-y", type=int, default=45)
    p.add_argument("--gen-density", type=float, default=0.4)
    p.add_argument("--gen-patterns", type=int, default=36)
    p.add_argument("--mode", choices=("aware", "unaware", "cover+unaware"),
                   default="cover+unaware")
    p.add_argument("--exact-limit", type=int, default=14)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--svg", action="store_true")
    p.add_argument("--dump-graph", action="store_true")
    p.add_argument("--dump-matches", action="store_true")
    _add_tech_flags(p)
    p.set_defaults(func=_cmd_run)

    p = sub.add_parser("experiment",
                       help="three-way aware / unaware / cover+unaware comparison")
    p.add_argument("--replications", type=int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--size-min", type=int, default=6,
                   help="smallest per-instance via blob")
    p.add_argument("--size-max", type=int, default=14,
                   help="largest per-instance via blob")
    p.add_argument("--gen-pitch-x", type=int, default=70)
    p.add_argument("--gen-pitch-y", type=int, default=45)
    p.add_argument("--gen-patterns", type=int, default=36)
    p.add_argument("--min-structures", type=int, default=2,
                   help="minimum segments+nodes per generated pattern")
    p.add_argument("--exact-limit", type=int, default=14)
    p.add_argument("--out-dir")
    _add_tech_flags(p)
    p.set_defaults(func=_cmd_experiment)

    p = sub.add_parser("render", help="render a decomposition to SVG")
    p.add_argument("--layout", required=True)
    p.add_argument("--decomposition", required=True)
    p.add_argument("--library")
    p.add_argument("--report", action="store_true",
                   help="re-verify and highlight violations")
    p.add_argument("--out", required=True)
    _add_tech_flags(p)
    p.set_defaults(func=_cmd_render)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except PipelineError as exc:
        print(f"error {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"error [{args.command}] {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
