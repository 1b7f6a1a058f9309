"""End-to-end pipeline and the three-way experiment harness.

The full flow is: build graph, detect potential hotspots, enumerate
eliminators, greedy cover, apply chosen eliminators, decompose, verify.
Every stage writes its JSON artifact into the output directory plus a
final report.json; wall-clock stage timings go to a separate timings.json
so report bytes stay identical across repeated runs and thread counts.

The experiment harness compares, on seeded synthetic instances:

  (a) exact hotspot-aware decomposition        (optimal reference)
  (b) exact hotspot-unaware decomposition      (worst baseline)
  (c) greedy cover + exact unaware decomposition (the heuristic flow)

and reports totals plus ratios normalized to (a). Each instance is one
connected via blob, the unit a full layout decomposes into for
independent processing, sized to fit the exact solver; its library holds
neighborhood patterns (two or more templates per window), the kind the
elimination model can always act on. Both choices keep the exact aware
solve a true global optimum, so (a) <= (c) and (a) <= (b) hold per
instance by construction and the comparison isolates the heuristic's
quality. Full-scale evaluations of this flow land around 1 / 5.13 / 1.18
for max group size 2 and 1 / 6.52 / 1.34 for size 3; the harness records
those reference ratios alongside its own desk-scale numbers for context.
"""

from __future__ import annotations

import json
import random
import time
from dataclasses import dataclass, field
from pathlib import Path

from .cover import CoverResult, apply_eliminators, greedy_cover
from .decompose import Decomposition, SolveMode, decompose
from .graph import LayoutGraph, build_graph
from .hotspots import HotspotLibrary, gen_random_patterns, load_library, save_library
from .layout import (Layout, Via, gen_random_layout, load_layout, save_layout,
                     validate_layout)
from .matcher import enumerate_eliminators, find_potential_hotspots, matches_to_json_dict
from .render import render_svg
from .tech import TechParams
from .verify import ViolationReport, verify

MODES = ("aware", "unaware", "cover+unaware")

REFERENCE_RATIOS = {
    "max_g_2": {"aware": 1.0, "unaware": 5.13, "cover+unaware": 1.18},
    "max_g_3": {"aware": 1.0, "unaware": 6.52, "cover+unaware": 1.34},
}


class PipelineError(RuntimeError):
    """A stage failure, tagged with the stage name."""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"[{stage}] {cause}")
        self.stage = stage
        self.cause = cause


@dataclass(frozen=True)
class GeneratorSpec:
    rows: int = 40
    cols: int = 40
    pitch_x: int = 70
    pitch_y: int = 45
    density: float = 0.4


@dataclass(frozen=True)
class RunConfig:
    layout_path: str | None = None
    library_path: str | None = None
    layout_gen: GeneratorSpec | None = None
    library_patterns: int = 36
    tech: TechParams = field(default_factory=TechParams)
    mode: str = "cover+unaware"
    exact_limit: int = 14
    threads: int = 1
    seed: int = 0
    out_dir: str | None = None
    svg: bool = False
    dump_graph: bool = False
    dump_matches: bool = False

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.layout_path is None and self.layout_gen is None:
            raise ValueError("either layout_path or layout_gen is required")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")


@dataclass
class PipelineResult:
    layout: Layout
    library: HotspotLibrary
    graph: LayoutGraph
    cover_result: CoverResult | None
    decomposition: Decomposition
    report: ViolationReport
    timings: dict[str, float]
    artifacts: dict[str, Path]


def _write_json(path: Path, data: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
        fh.write("\n")


def run_pipeline(config: RunConfig) -> PipelineResult:
    """Execute the configured flow; see the module docstring for stages."""
    out_dir = Path(config.out_dir) if config.out_dir else None
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
    timings: dict[str, float] = {}
    artifacts: dict[str, Path] = {}
    t_start = time.perf_counter()

    def stage(name: str):
        class _Timer:
            def __enter__(self_inner):
                self_inner.t0 = time.perf_counter()

            def __exit__(self_inner, exc_type, exc, tb):
                timings[name] = time.perf_counter() - self_inner.t0
                if exc is not None and not isinstance(exc, PipelineError):
                    raise PipelineError(name, exc) from exc
        return _Timer()

    with stage("load_layout"):
        if config.layout_path is not None:
            layout = load_layout(config.layout_path)
        else:
            g = config.layout_gen
            layout = gen_random_layout(config.seed, g.rows, g.cols, g.pitch_x,
                                       g.pitch_y, g.density, config.tech)
        bad = validate_layout(layout, config.tech)
        if bad:
            raise ValueError(f"layout has {len(bad)} spacing violation(s); first: {bad[0]}")
        if out_dir is not None and config.layout_path is None:
            artifacts["layout"] = out_dir / "layout.json"
            save_layout(layout, artifacts["layout"])

    with stage("load_library"):
        if config.library_path is not None:
            library = load_library(config.library_path, config.tech)
        else:
            library = gen_random_patterns(config.seed, count=config.library_patterns,
                                          tech=config.tech)
        if out_dir is not None and config.library_path is None:
            artifacts["library"] = out_dir / "library.json"
            save_library(library, artifacts["library"])

    with stage("build_graph"):
        graph = build_graph(layout, config.tech)
        if out_dir is not None and config.dump_graph:
            artifacts["graph"] = out_dir / "graph.json"
            _write_json(artifacts["graph"], graph.to_json_dict())

    cover_result: CoverResult | None = None
    solve_graph = graph
    if config.mode == "cover+unaware":
        with stage("detect"):
            phs = find_potential_hotspots(layout, library, graph, threads=config.threads)
            eliminators = enumerate_eliminators(phs, graph)
            if out_dir is not None and config.dump_matches:
                artifacts["matches"] = out_dir / "matches.json"
                _write_json(artifacts["matches"], matches_to_json_dict(phs, eliminators))
        with stage("cover"):
            cover_result = greedy_cover(phs, eliminators)
            solve_graph = apply_eliminators(graph, cover_result)
            if out_dir is not None:
                artifacts["cover"] = out_dir / "cover.json"
                _write_json(artifacts["cover"], cover_result.to_json_dict())

    with stage("decompose"):
        mode = SolveMode(hotspot_aware=(config.mode == "aware"),
                         exact_limit=config.exact_limit)
        decomposition = decompose(solve_graph, config.tech,
                                  library if mode.hotspot_aware else None,
                                  mode, threads=config.threads)
        if out_dir is not None:
            artifacts["decomposition"] = out_dir / "decomposition.json"
            _write_json(artifacts["decomposition"], decomposition.to_json_dict())

    with stage("verify"):
        report = verify(layout, decomposition, config.tech, library,
                        meta={"mode": config.mode, "seed": config.seed,
                              "n_vias": len(layout),
                              "exact_components": decomposition.exact_components,
                              "fallback_components": decomposition.fallback_components,
                              "cover": cover_result.to_json_dict()["stats"]
                                       if cover_result else None})
        if out_dir is not None:
            artifacts["report"] = out_dir / "report.json"
            _write_json(artifacts["report"], report.to_json_dict())
            artifacts["report_text"] = out_dir / "report.txt"
            artifacts["report_text"].write_text(report.summary() + "\n",
                                                encoding="utf-8")

    if config.svg:
        with stage("render"):
            if out_dir is None:
                raise ValueError("svg output needs an out_dir")
            artifacts["svg"] = out_dir / "layout.svg"
            render_svg(layout, decomposition, config.tech, report, library,
                       artifacts["svg"])

    timings["total"] = time.perf_counter() - t_start
    if out_dir is not None:
        artifacts["timings"] = out_dir / "timings.json"
        _write_json(artifacts["timings"], {"stages": timings})
    return PipelineResult(layout=layout, library=library, graph=graph,
                          cover_result=cover_result, decomposition=decomposition,
                          report=report, timings=timings, artifacts=artifacts)


def gen_blob_layout(seed: int, n_vias: int, pitch_x: int = 70,
                    pitch_y: int = 45) -> Layout:
    """One connected via blob grown on a grid; a single component under the
    default technology, standing in for one unit of a full layout's
    per-component processing. Deterministic per seed."""
    if n_vias < 1:
        raise ValueError("n_vias must be >= 1")
    rng = random.Random(seed)
    cells = {(0, 0)}
    frontier = {(0, 1), (0, -1), (1, 0), (-1, 0)}
    while len(cells) < n_vias:
        cell = rng.choice(sorted(frontier))
        cells.add(cell)
        frontier.discard(cell)
        r, c = cell
        for nb in ((r - 1, c), (r + 1, c), (r, c - 1), (r, c + 1)):
            if nb not in cells:
                frontier.add(nb)
    min_r = min(r for r, _ in cells)
    min_c = min(c for _, c in cells)
    coords = sorted((r - min_r, c - min_c) for r, c in cells)
    return Layout(tuple(Via(i, c * pitch_x, r * pitch_y)
                        for i, (r, c) in enumerate(coords)))


@dataclass(frozen=True)
class ExperimentConfig:
    replications: int = 200
    seed: int = 0
    tech: TechParams = field(default_factory=TechParams)
    size_min: int = 6
    size_max: int = 14
    pitch_x: int = 70
    pitch_y: int = 45
    library_patterns: int = 36
    min_structures: int = 2
    exact_limit: int = 14
    max_attempts_factor: int = 3


def _three_way_instance(seed: int, cfg: ExperimentConfig):
    """One seeded instance solved in all three modes; None if any component
    exceeds the exact limit (the optimal columns need exact solves)."""
    tech = cfg.tech
    rng = random.Random(seed)
    layout = gen_blob_layout(seed, rng.randint(cfg.size_min, cfg.size_max),
                             cfg.pitch_x, cfg.pitch_y)
    library = gen_random_patterns(seed, cell_pitch_x=cfg.pitch_x,
                                  cell_pitch_y=cfg.pitch_y,
                                  count=cfg.library_patterns, tech=tech,
                                  min_structures=cfg.min_structures)
    graph = build_graph(layout, tech)
    if any(len(c) > cfg.exact_limit for c in graph.components):
        return None

    aware = decompose(graph, tech, library,
                      SolveMode(hotspot_aware=True, exact_limit=cfg.exact_limit))
    unaware = decompose(graph, tech, None,
                        SolveMode(hotspot_aware=False, exact_limit=cfg.exact_limit))

    phs = find_potential_hotspots(layout, library, graph)
    eliminators = enumerate_eliminators(phs, graph)
    cover_result = greedy_cover(phs, eliminators)
    covered_graph = apply_eliminators(graph, cover_result)
    if any(len(c) > cfg.exact_limit for c in covered_graph.components):
        return None
    covered = decompose(covered_graph, tech, None,
                        SolveMode(hotspot_aware=False, exact_limit=cfg.exact_limit))

    return {
        "seed": seed,
        "n_vias": len(layout),
        "aware": verify(layout, aware, tech, library).n_violations,
        "unaware": verify(layout, unaware, tech, library).n_violations,
        "cover+unaware": verify(layout, covered, tech, library).n_violations,
        "chosen_eliminators": len(cover_result.chosen),
        "residual": len(cover_result.residual),
        "instance": (layout, library, graph, cover_result, covered),
    }


def run_experiment(cfg: ExperimentConfig, out_dir: str | Path | None = None,
                   keep_instances: bool = False) -> dict:
    """Three-way comparison over seeded instances; ratios normalize to (a)."""
    rows = []
    skipped = 0
    seed = cfg.seed
    attempts = 0
    max_attempts = cfg.replications * cfg.max_attempts_factor
    while len(rows) < cfg.replications and attempts < max_attempts:
        attempts += 1
        row = _three_way_instance(seed, cfg)
        seed += 1
        if row is None:
            skipped += 1
            continue
        if not keep_instances:
            row = {key: val for key, val in row.items() if key != "instance"}
        rows.append(row)

    totals = {m: sum(r[m] for r in rows) for m in MODES}
    aware_total = totals["aware"]
    ratios = {m: (totals[m] / aware_total if aware_total else None) for m in MODES}
    gap = totals["unaware"] - totals["aware"]
    closed = totals["unaware"] - totals["cover+unaware"]
    result = {
        "config": {"replications": cfg.replications, "seed": cfg.seed,
                   "size_min": cfg.size_min, "size_max": cfg.size_max,
                   "pitch_x": cfg.pitch_x, "pitch_y": cfg.pitch_y,
                   "library_patterns": cfg.library_patterns,
                   "min_structures": cfg.min_structures,
                   "exact_limit": cfg.exact_limit,
                   "tech": cfg.tech.to_dict()},
        "instances": [{key: val for key, val in r.items() if key != "instance"}
                      for r in rows],
        "aggregate": {
            "usable": len(rows),
            "skipped": skipped,
            "totals": totals,
            "ratios": ratios,
            "gap": gap,
            "gap_closed": closed,
            "gap_closure": (closed / gap) if gap > 0 else None,
        },
        "reference_ratios": REFERENCE_RATIOS,
    }
    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        _write_json(out_dir / "experiment.json", result)
        (out_dir / "experiment.txt").write_text(format_experiment(result),
                                                encoding="utf-8")
    if keep_instances:
        result["_instances"] = rows
    return result


def format_experiment(result: dict) -> str:
    agg = result["aggregate"]
    lines = [
        f"{'instances':<14}{agg['usable']} usable, {agg['skipped']} skipped",
        f"{'mode':<16}{'total violations':>18}{'ratio':>10}",
    ]
    for m in MODES:
        ratio = agg["ratios"][m]
        ratio_s = f"{ratio:.2f}" if ratio is not None else "n/a"
        lines.append(f"{m:<16}{agg['totals'][m]:>18}{ratio_s:>10}")
    closure = agg["gap_closure"]
    closure_s = f"{100 * closure:.1f}%" if closure is not None else "n/a"
    lines.append(f"gap closed by cover pass: {agg['gap_closed']} of {agg['gap']} "
                 f"({closure_s})")
    ref = result["reference_ratios"]
    lines.append("full-scale reference ratios: "
                 f"max_g=2 -> 1 / {ref['max_g_2']['unaware']} / {ref['max_g_2']['cover+unaware']}, "
                 f"max_g=3 -> 1 / {ref['max_g_3']['unaware']} / {ref['max_g_3']['cover+unaware']}")
    return "\n".join(lines) + "\n"
