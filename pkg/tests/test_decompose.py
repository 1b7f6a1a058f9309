import random
from dataclasses import replace

import pytest

from dsamp.cover import apply_eliminators, greedy_cover
from dsamp.decompose import (DecomposeError, SolveMode, decompose, load_decomposition,
                             objective_value, save_decomposition,
                             solve_component_exact, solve_component_heuristic)
from dsamp.graph import build_graph
from dsamp.hotspots import gen_random_patterns
from dsamp.layout import gen_random_layout
from dsamp.matcher import Eliminator
from dsamp.pipeline import gen_blob_layout
from dsamp.tech import TechParams
from dsamp.verify import verify

from helpers import make_layout, pair_singleton_scenario
from oracles import oracle_decompose, oracle_match, oracle_objective


def _windows_from_oracle(layout, library):
    """Solver-style windows derived through the exhaustive-translation oracle."""
    out = []
    pat = {p.id: p for p in library.patterns}
    for pid, _origin, consts, non in sorted(
            oracle_match(layout, library, 70, 45, prune_unrealizable=True)):
        p = pat[pid]
        segments = tuple(tuple(consts[i] for i in seg) for seg in p.segments)
        nodes = tuple(consts[i] for i in p.nodes)
        out.append((consts, non, segments, nodes))
    return out


def _solve_value(layout, tech, library=None, aware=False, graph=None):
    graph = graph or build_graph(layout, tech)
    mode = SolveMode(hotspot_aware=aware, exact_limit=len(layout))
    comp = tuple(range(len(layout)))
    _, _, value = solve_component_exact(comp, graph, tech, library, mode)
    return value


def test_conflicting_pair_two_masks():
    tech = replace(TechParams(), num_masks=2)
    layout = make_layout([(0, 0), (60, 0)])
    dec = decompose(build_graph(layout, tech), tech)
    assert dec.groups == ((0,), (1,))
    assert dec.mask_of_via(0) != dec.mask_of_via(1)
    assert verify(layout, dec, tech).n_violations == 0


def test_groupable_pair_single_mask():
    tech = replace(TechParams(), num_masks=1)
    layout = make_layout([(0, 0), (40, 0)])
    dec = decompose(build_graph(layout, tech), tech)
    assert dec.groups == ((0, 1),)
    assert dec.mask_of_group == (0,)
    assert verify(layout, dec, tech).n_violations == 0


def test_single_via_base_case():
    tech = TechParams()
    layout = make_layout([(50, 50)])
    graph = build_graph(layout, tech)
    blocks, masks, value = solve_component_exact((0,), graph, tech, None,
                                                 SolveMode(exact_limit=4))
    assert blocks == [(0,)]
    assert masks == [0]
    assert value == 0


def test_pair_singleton_window_aware_optimum_zero():
    layout, library, _ = pair_singleton_scenario()
    tech = replace(library.tech, num_masks=2)
    graph = build_graph(layout, tech)
    mode = SolveMode(hotspot_aware=True, exact_limit=4)
    _, _, value = solve_component_exact(tuple(range(4)), graph, tech, library, mode)
    assert value == 0
    dec = decompose(graph, tech, library, mode)
    assert verify(layout, dec, tech, library).n_violations == 0


def test_pair_singleton_window_one_mask_matches_oracle():
    layout, library, _ = pair_singleton_scenario()
    tech = replace(library.tech, num_masks=1)
    graph = build_graph(layout, tech)
    forced = frozenset({(0, 1)})  # lock in the pattern's group structure
    graph = replace(graph, forced_groups=forced)
    windows = _windows_from_oracle(layout, library)
    want = oracle_decompose(range(4), graph.conflict_edges, graph.group_edges,
                            forced, 1, windows)
    mode = SolveMode(hotspot_aware=True, exact_limit=4)
    _, _, value = solve_component_exact(tuple(range(4)), graph, tech, library, mode)
    assert value == want


def test_exact_limit_enforced():
    tech = TechParams()
    layout = make_layout([(0, 0), (0, 45), (0, 90)])
    graph = build_graph(layout, tech)
    with pytest.raises(DecomposeError, match="exceeds exact_limit"):
        solve_component_exact((0, 1, 2), graph, tech, None, SolveMode(exact_limit=2))


@pytest.mark.parametrize("seed", range(12))
@pytest.mark.parametrize("max_g", [2, 3])
def test_exact_matches_exhaustive_oracle(seed, max_g):
    tech = TechParams(max_g=max_g, num_masks=3)
    rng = random.Random(seed * 31 + max_g)
    layout = gen_blob_layout(seed * 7 + max_g, rng.randint(2, 8))
    library = gen_random_patterns(seed, count=10, tech=tech, min_structures=2)
    graph = build_graph(layout, tech)
    assert len(graph.components) == 1
    comp = tuple(range(len(layout)))
    windows = _windows_from_oracle(layout, library)
    for aware in (False, True):
        want = oracle_decompose(comp, graph.conflict_edges, graph.group_edges,
                                graph.forced_groups, tech.num_masks,
                                windows if aware else [])
        mode = SolveMode(hotspot_aware=aware, exact_limit=8)
        _, _, got = solve_component_exact(comp, graph, tech,
                                          library if aware else None, mode)
        assert got == want, (seed, max_g, aware)


@pytest.mark.parametrize("seed", range(8))
def test_heuristic_never_beats_exact(seed):
    tech = TechParams(max_g=2, num_masks=2)
    layout = gen_blob_layout(seed + 40, random.Random(seed).randint(2, 8))
    graph = build_graph(layout, tech)
    comp = tuple(range(len(layout)))
    blocks, masks = solve_component_heuristic(comp, graph, tech)
    heur = oracle_objective(blocks, masks, list(graph.conflict_edges), [])
    _, _, exact = solve_component_exact(comp, graph, tech, None,
                                        SolveMode(exact_limit=8))
    assert heur >= exact


def test_chain_heuristic_groups_then_colors():
    tech = replace(TechParams(max_g=2), num_masks=2)
    layout = make_layout([(0, 0), (40, 0), (80, 0)])
    graph = build_graph(layout, tech)
    blocks, masks = solve_component_heuristic((0, 1, 2), graph, tech)
    assert blocks == [(0, 1), (2,)]
    assert oracle_objective(blocks, masks, list(graph.conflict_edges), []) == 0
    _, _, exact = solve_component_exact((0, 1, 2), graph, tech, None,
                                        SolveMode(exact_limit=3))
    assert exact == 0


def test_added_cover_edge_separates_endpoints():
    # two far-apart singletons with an added conflict edge between them
    tech = TechParams(num_masks=2)
    layout = make_layout([(0, 0), (0, 200)])
    graph = build_graph(layout, tech)
    chosen = Eliminator(0, "conflict", (0, 1), frozenset({0}))
    updated = apply_eliminators(graph, greedy_cover([0], [chosen]))
    dec = decompose(updated, tech)
    assert dec.mask_of_via(0) != dec.mask_of_via(1)
    # the exact solver agrees the separated assignment is the optimum
    _, _, value = solve_component_exact((0, 1), updated, tech, None,
                                        SolveMode(exact_limit=2))
    assert value == 0
    # and the greedy fallback honors the added edge just like a native one
    blocks, masks = solve_component_heuristic((0, 1), updated, tech)
    block_of = {v: bi for bi, b in enumerate(blocks) for v in b}
    assert masks[block_of[0]] != masks[block_of[1]]


def test_forced_groups_verbatim():
    tech = TechParams(max_g=3)
    layout = make_layout([(0, 0), (0, 45), (0, 90), (0, 135)])
    graph = build_graph(layout, tech)
    chosen = Eliminator(0, "affinity", (1, 2), frozenset({0}))
    updated = apply_eliminators(graph, greedy_cover([0], [chosen]))
    dec = decompose(updated, tech)
    assert (1, 2) in dec.groups
    blocks, _ = solve_component_heuristic((0, 1, 2, 3), updated, tech)
    assert (1, 2) in blocks


@pytest.mark.parametrize("seed", range(6))
def test_aware_objective_dominates_unaware(seed):
    tech = TechParams(max_g=2)
    layout = gen_blob_layout(seed + 90, random.Random(seed).randint(4, 10))
    library = gen_random_patterns(seed, count=20, tech=tech, min_structures=2)
    graph = build_graph(layout, tech)
    aware_mode = SolveMode(hotspot_aware=True, exact_limit=12)
    dec_aware = decompose(graph, tech, library, aware_mode)
    dec_unaware = decompose(graph, tech, None, SolveMode(exact_limit=12))
    full = lambda d: objective_value(d, graph, library, aware_mode)
    assert full(dec_aware) <= full(dec_unaware)


def test_objective_matches_verifier_on_plain_graph():
    for seed in range(6):
        tech = TechParams(max_g=2)
        layout = gen_blob_layout(seed + 11, random.Random(seed).randint(3, 9))
        library = gen_random_patterns(seed, count=12, tech=tech, min_structures=2)
        graph = build_graph(layout, tech)
        dec = decompose(graph, tech, None, SolveMode(exact_limit=10))
        report = verify(layout, dec, tech, library)
        got = objective_value(dec, graph, library, SolveMode(hotspot_aware=True))
        assert got == report.n_violations


def test_thread_invariance():
    tech = TechParams(max_g=2)
    layout = gen_random_layout(5, 20, 12, 70, 45, 0.4, tech)
    library = gen_random_patterns(5, count=20, tech=tech)
    graph = build_graph(layout, tech)
    mode = SolveMode(hotspot_aware=True, exact_limit=10)
    assert decompose(graph, tech, library, mode, threads=1) == \
        decompose(graph, tech, library, mode, threads=4)


def test_component_mask_rotation_spreads_labels():
    tech = TechParams()
    layout = make_layout([(0, 0), (500, 500), (1000, 1000)])
    dec = decompose(build_graph(layout, tech), tech)
    assert [dec.mask_of_via(v) for v in range(3)] == [0, 1, 2]


def test_save_load_round_trip(tmp_path):
    tech = TechParams(max_g=2)
    layout = gen_random_layout(9, 8, 8, 70, 45, 0.5, tech)
    dec = decompose(build_graph(layout, tech), tech)
    path = tmp_path / "dec.json"
    save_decomposition(dec, path)
    again = load_decomposition(path)
    assert again.groups == dec.groups
    assert again.mask_of_group == dec.mask_of_group


def test_aware_requires_library():
    tech = TechParams()
    layout = make_layout([(0, 0)])
    graph = build_graph(layout, tech)
    with pytest.raises(DecomposeError, match="library"):
        decompose(graph, tech, None, SolveMode(hotspot_aware=True))


def test_empty_layout():
    tech = TechParams()
    graph = build_graph(make_layout([]), tech)
    dec = decompose(graph, tech)
    assert dec.groups == ()
    assert verify(make_layout([]), dec, tech).n_violations == 0
