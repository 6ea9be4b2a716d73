import pytest
from hypothesis import given, strategies as st

from hexcircles.lattice import (OMEGA, PETAL_OFFSETS, Region, edge_family, embed_reference,
                                flower, hexahedron, neighbors, path_to, quads_at, region_quads,
                                strip_kites, sublattice_class)

small = st.integers(-4, 4)
strip_point = st.tuples(small, small, st.integers(-1, 1)).map(lambda t: (t[0], t[1], t[2] - t[0] - t[1]))


def test_valence_of_centers_and_points():
    strip = Region("strip", 6)
    assert len(neighbors((0, 0, 0), strip)) == 6
    assert len(neighbors((1, 0, 0), strip)) == 3
    assert len(neighbors((0, 0, -1), strip)) == 3


@given(strip_point)
def test_valence_by_class(p):
    strip = Region("strip", 10)
    expected = 6 if sublattice_class(p) == 0 else 3
    assert len(neighbors(p, strip)) == expected


def test_flower_petals_and_opposites():
    fl = flower((0, 0, 0))
    assert len(set(fl.petals)) == 6 and len(set(fl.vertices)) == 6
    for j in range(3):
        a, b = fl.petals[j], fl.petals[j + 3]
        assert tuple(x + y for x, y in zip(a, b)) == (0, 0, 0)
    assert all(sublattice_class(p) == 0 for p in fl.petals)
    assert {sublattice_class(v) for v in fl.vertices} == {1, -1}


def test_flower_is_counterclockwise():
    import cmath
    fl = flower((0, 0, 0))
    args = [cmath.phase(embed_reference(v)) for v in fl.vertices]
    turns = [(args[(j + 1) % 6] - args[j]) % (2 * cmath.pi) for j in range(6)]
    assert all(abs(t - cmath.pi / 3) < 1e-12 for t in turns)


def test_petal_shares_two_vertices():
    fl = flower((2, -1, -1))
    for j, petal in enumerate(fl.petals):
        around = set(flower(petal).vertices)
        assert fl.vertices[j] in around and fl.vertices[(j + 1) % 6] in around


def test_flower_needs_center():
    with pytest.raises(ValueError):
        flower((1, 0, 0))


@given(st.tuples(small, small, small))
def test_path_to_sums(p):
    edges = path_to(p)
    assert len(edges) == sum(abs(t) for t in p)
    cur = (0, 0, 0)
    for e in edges:
        assert e.start == cur and edge_family(e.start, e.end) == e.family
        cur = e.end
    assert cur == p


def test_embedding_of_units():
    assert embed_reference((1, 1, 1)) == pytest.approx(0)
    assert embed_reference((0, 1, 0)) == pytest.approx(OMEGA)


def test_edge_family_rejects_non_neighbours():
    with pytest.raises(ValueError):
        edge_family((0, 0, 0), (1, 1, 0))
    assert edge_family((0, 0, 0), (0, 0, -1)) == 3


def test_region_kinds():
    assert (2, 3, -3) in Region("box", 4)
    assert (2, 3, -3) not in Region("sector", 4)
    assert (1, 0, -1) in Region("sector", 4)
    assert (-1, -1, 0) not in Region("halfbox", 3)
    assert (2, 1, 0) in Region("slab", 3)
    with pytest.raises(ValueError):
        Region("disk", 3)
    with pytest.raises(ValueError):
        Region("box", 0)


def test_hexahedron_corners():
    corners = hexahedron((0, 0, 0))
    assert len(set(corners)) == 8 and (1, 1, -1) in corners


def test_quads_are_elementary():
    for quad in quads_at((0, 0, 0)):
        fams = {edge_family(quad[i], quad[(i + 1) % 4]) for i in range(4)}
        assert len(fams) == 2


def test_region_quads_inside_region():
    region = Region("sector", 3)
    pts = set(region.indices())
    quads = region_quads(region)
    assert quads and all(q in pts for quad in quads for q in quad)


def test_strip_kites_start_at_centers():
    kites = strip_kites(Region("strip", 2))
    assert all(sublattice_class(k[0]) == 0 and sublattice_class(k[2]) == 0 for k in kites)
    assert len([k for k in kites if k[0] == (0, 0, 0)]) == 6


def test_petal_offsets_class_zero():
    assert all(sum(d) == 0 for d in PETAL_OFFSETS)
