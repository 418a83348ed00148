import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.spatial.distance import pdist

from fracdq.geometry import Location, classify, disc, l_shape, trapezoid, unit_square
from fracdq.nodes import (
    NODE_FILE_HEADER,
    NodeSet,
    NodeSetError,
    chebyshev_1d,
    grid_2d,
    load_nodes,
    save_nodes,
    scattered_2d,
)


def _check_partition(nodes, domain):
    for i in nodes.interior_idx:
        assert classify(domain, nodes.points[i]) is Location.INTERIOR
    for i in nodes.boundary_idx:
        assert classify(domain, nodes.points[i]) is Location.BOUNDARY
    both = np.sort(np.concatenate([nodes.interior_idx, nodes.boundary_idx]))
    assert np.array_equal(both, np.arange(len(nodes)))


def test_chebyshev_examples():
    assert chebyshev_1d(0, 1, 2).x.tolist() == [0.0, 0.5, 1.0]
    assert chebyshev_1d(0, 1, 4).x[1] == pytest.approx(0.146446609406726, abs=1e-15)
    assert chebyshev_1d(2, 4, 2).x.tolist() == [2.0, 3.0, 4.0]
    n = chebyshev_1d(0, 1, 7)
    assert n.boundary_idx.tolist() == [0, 7]
    assert n.interior_idx.tolist() == list(range(1, 7))
    with pytest.raises(NodeSetError):
        chebyshev_1d(0, 1, 1)


@settings(max_examples=100, deadline=None)
@given(st.floats(-5, 5), st.floats(0.1, 10), st.integers(2, 80))
def test_chebyshev_symmetry(a, width, M):
    b = a + width
    x = chebyshev_1d(a, b, M).x
    assert np.all(np.diff(x) > 0)
    assert np.max(np.abs(x + x[::-1] - (a + b))) <= 1e-12 * max(1.0, abs(a) + abs(b))


def test_grid_square_nine():
    n = grid_2d(unit_square(), 9)
    assert len(n) == 9
    assert len(n.boundary_idx) == 8 and len(n.interior_idx) == 1
    assert n.points[n.interior_idx[0]].tolist() == [0.5, 0.5]


def test_grid_circle_containment():
    n = grid_2d(disc(), 21)
    r2 = (n.x - 0.5) ** 2 + (n.y - 0.5) ** 2
    assert np.all(r2 <= 0.25 + 1e-10)
    _check_partition(n, disc())


def test_grid_trapezoid_count_and_partition():
    n = grid_2d(trapezoid(), 66)
    assert abs(len(n) - 66) <= 6.6
    _check_partition(n, trapezoid())


@pytest.mark.parametrize("count", [100, 196, 289, 441])
def test_grid_square_counts(count):
    n = grid_2d(unit_square(), count)
    assert len(n) == count
    _check_partition(n, unit_square())


def test_scattered_separation_and_determinism():
    sq = unit_square()
    a = scattered_2d(sq, 74, seed=1)
    b = scattered_2d(sq, 74, seed=1)
    assert a == b
    assert a.points.tobytes() == b.points.tobytes()
    sep = 0.5 * sq.diameter / math.sqrt(74)
    inner = a.points[a.interior_idx]
    assert pdist(inner).min() >= sep * (1 - 1e-12)
    _check_partition(a, sq)
    assert len(a) == 74
    c = scattered_2d(sq, 74, seed=2)
    assert not np.array_equal(a.points, c.points)


def test_scattered_l_shape():
    lsh = l_shape()
    n = scattered_2d(lsh, 593, seed=1)
    _check_partition(n, lsh)
    assert len(n) == 593


@pytest.mark.parametrize("domain", [trapezoid(), disc(), l_shape()])
def test_scattered_other_domains(domain):
    n = scattered_2d(domain, 150, seed=3)
    assert len(n) == 150
    _check_partition(n, domain)


def test_generators_reject_bad_input():
    with pytest.raises(NodeSetError):
        grid_2d(unit_square(), 4)
    with pytest.raises(NodeSetError):
        scattered_2d(unit_square(), 5)


def test_nodeset_invariants():
    pts = np.array([[0.0, 0.0], [0.5, 0.5], [1.0, 1.0]])
    with pytest.raises(NodeSetError):
        NodeSet(pts, [1], [0])  # index 2 missing
    with pytest.raises(NodeSetError):
        NodeSet(pts, [1, 2], [0, 2])  # overlap
    with pytest.raises(NodeSetError):
        NodeSet(np.array([[0.0, 0.0], [0.0, 0.0]]), [1], [0])
    n = NodeSet(pts, [1], [0, 2])
    with pytest.raises(ValueError):
        n.points[0, 0] = 3.0


def test_round_trip(tmp_path):
    for dom, nodes in [(unit_square(), scattered_2d(unit_square(), 60, 4)), (l_shape(), grid_2d(l_shape(), 80))]:
        path = tmp_path / "nodes.txt"
        save_nodes(nodes, path)
        assert path.read_text().splitlines()[0] == NODE_FILE_HEADER
        assert load_nodes(path, dom) == nodes


def test_load_examples(tmp_path):
    ok = tmp_path / "ok.txt"
    ok.write_text("# comment\n0.5 0.5 interior\n")
    n = load_nodes(ok, unit_square())
    assert len(n) == 1 and n.interior_idx.tolist() == [0]

    bad = tmp_path / "bad.txt"
    bad.write_text("0.5 0.5 interior\n2.0 0.0 interior\n")
    with pytest.raises(NodeSetError, match=r"node 1 at \(2\.0, 0\.0\)"):
        load_nodes(bad, unit_square())

    garbled = tmp_path / "garbled.txt"
    garbled.write_text("# header\n0.5 0.5 interior\n0.1 oops interior\n")
    with pytest.raises(NodeSetError, match=":3:"):
        load_nodes(garbled, unit_square())

    flag = tmp_path / "flag.txt"
    flag.write_text("0.5 0.5 inside\n")
    with pytest.raises(NodeSetError, match=":1:"):
        load_nodes(flag, unit_square())

    wrong = tmp_path / "wrong.txt"
    wrong.write_text("1.0 0.5 interior\n")
    with pytest.raises(NodeSetError, match="boundary"):
        load_nodes(wrong, unit_square())
