from dsamp.decompose import Decomposition, decompose
from dsamp.graph import build_graph
from dsamp.hotspots import gen_random_patterns
from dsamp.layout import gen_random_layout
from dsamp.render import render_svg
from dsamp.tech import TechParams
from dsamp.verify import verify

from helpers import make_layout, pair_singleton_scenario


def test_single_via_single_square():
    tech = TechParams()
    layout = make_layout([(50, 50)])
    svg = render_svg(layout, Decomposition(((0,),), (0,)), tech)
    assert svg.count('class="via mask0"') == 1
    assert svg.count('class="via') == 1


def test_conflict_highlight():
    tech = TechParams()
    layout = make_layout([(0, 0), (60, 0)])
    decomposition = Decomposition(((0,), (1,)), (0, 0))
    report = verify(layout, decomposition, tech)
    assert report.n_conflicts == 1
    svg = render_svg(layout, decomposition, tech, report)
    assert svg.count('class="conflict"') == 1


def test_element_counts_match_report():
    tech = TechParams(max_g=2)
    layout = gen_random_layout(8, 12, 8, 70, 45, 0.5, tech)
    library = gen_random_patterns(8, count=20, tech=tech)
    decomposition = decompose(build_graph(layout, tech), tech)
    report = verify(layout, decomposition, tech, library)
    svg = render_svg(layout, decomposition, tech, report, library)
    assert svg.count('class="via') == len(layout)
    assert svg.count('class="group"') == len(decomposition.groups)
    assert svg.count('class="conflict"') + svg.count('class="hotspot"') == \
        report.n_violations


def test_hotspot_window_rectangle():
    layout, library, ids = pair_singleton_scenario()
    a, b, c, d = (ids[k] for k in "abcd")
    decomposition = Decomposition(((a, b), (c,), (d,)), (0, 1, 0))
    report = verify(layout, decomposition, library.tech, library)
    assert report.n_hotspots == 1
    svg = render_svg(layout, decomposition, library.tech, report, library)
    assert svg.count('class="hotspot"') == 1
    assert 'width="105"' in svg  # window_w 90 plus one via width


def test_deterministic_bytes(tmp_path):
    tech = TechParams(max_g=2)
    layout = gen_random_layout(4, 10, 10, 70, 45, 0.4, tech)
    decomposition = decompose(build_graph(layout, tech), tech)
    p1, p2 = tmp_path / "a.svg", tmp_path / "b.svg"
    render_svg(layout, decomposition, tech, out_path=p1)
    render_svg(layout, decomposition, tech, out_path=p2)
    assert p1.read_bytes() == p2.read_bytes()
