"""Hotspot-aware DSA grouping and multiple-patterning mask assignment.

Pipeline: build the hybrid hypergraph from a via layout, detect potential
hotspot windows against a pattern library, eliminate them with a greedy
Set Cover pass (added conflict edges and forced DSA groups), decompose
into groups and masks, and audit the result.
"""

from .cover import BucketList, CoverResult, CoverStats, apply_eliminators, greedy_cover
from .decompose import (Decomposition, DecomposeError, SolveMode, decompose,
                        load_decomposition, objective_value, save_decomposition,
                        solve_component_exact, solve_component_heuristic)
from .graph import (ADDED_BY_COVER, NATIVE, GraphError, GroupEdge, LayoutGraph,
                    build_graph, connected_components, is_groupable)
from .hotspots import (HotspotLibrary, HotspotPattern, LibraryError,
                       gen_random_patterns, load_library, save_library,
                       validate_pattern)
from .layout import (Layout, LayoutError, SpacingViolation, Via, gen_random_layout,
                     load_layout, save_layout, validate_layout)
from .matcher import (AFFINITY, CONFLICT, Eliminator, PotentialHotspot,
                      enumerate_eliminators, find_potential_hotspots)
from .pipeline import (ExperimentConfig, GeneratorSpec, PipelineError, RunConfig,
                       gen_blob_layout, run_experiment, run_pipeline)
from .render import render_svg
from .tech import TechParams, load_tech, save_tech
from .verify import (ConflictViolation, HotspotViolation, ViolationReport,
                     count_conflicts, find_realized_hotspots, verify)

__version__ = "0.1.0"
