import pytest
from hypothesis import given, strategies as st

from hypvol import fixtures as fx
from hypvol.complex import (
    Complex,
    FacePairing,
    InvalidComplexError,
    NonManifoldError,
    VertexRecord,
    build_cone_complex,
    complex_from_json,
    complex_to_json,
    euler_characteristic,
    invert_word,
    link_sphere,
    perm_parity,
    reduce_word,
    suspend,
    traverse_star,
    validate,
)


def tetra_boundary(flip=False, drop=False):
    top = [("b", "c", "d"), ("a", "c", "d"), ("a", "b", "d"), ("a", "b", "c")]
    ors = [1, -1, 1, -1]
    if flip:
        ors[0] = -ors[0]
    if drop:
        top, ors = top[:3], ors[:3]
    return Complex(2, [VertexRecord(v) for v in "abcd"], top, ors)


def f_vector(K):
    out = [0] * (K.dim + 1)
    for c in K.face_classes:
        out[c.dim] += 1
    return out


def test_word_helpers():
    assert reduce_word([1, 2, -2, -1, 3]) == (3,)
    assert reduce_word([1, -1]) == ()
    assert invert_word([1, -2, 3]) == (-3, 2, -1)
    assert perm_parity([0, 1, 2]) == 1
    assert perm_parity([1, 0, 2]) == -1
    assert perm_parity([2, 0, 1]) == 1


@given(st.lists(st.sampled_from([-3, -2, -1, 1, 2, 3]), max_size=12))
def test_word_times_inverse_reduces_to_empty(w):
    assert reduce_word(list(w) + list(invert_word(w))) == ()
    r = reduce_word(w)
    assert all(r[i] != -r[i + 1] for i in range(len(r) - 1))


def test_tetrahedron_boundary_is_a_sphere():
    K = tetra_boundary()
    assert validate(K).ok
    assert euler_characteristic(K) == 2
    assert f_vector(K) == [4, 6, 4]


def test_open_facet_reported():
    rep = validate(tetra_boundary(drop=True))
    assert not rep.ok
    assert any("open facet" in v for v in rep.violations)
    assert validate(tetra_boundary(drop=True), closed=False).ok
    with pytest.raises(InvalidComplexError):
        euler_characteristic(tetra_boundary(drop=True))


def test_incoherent_orientation_reported():
    rep = validate(tetra_boundary(flip=True))
    assert any("incoherent orientation" in v for v in rep.violations)


def test_bad_input_reported():
    K = Complex(2, [VertexRecord("a"), VertexRecord("b")], [("a", "b", "z"), ("a", "a", "b")])
    v = validate(K).violations
    assert any("unknown vertex" in x for x in v)
    assert any("repeated vertex" in x for x in v)
    K = Complex(1, [VertexRecord("a"), VertexRecord("a", "cusp", 3)], [("a", "a")])
    assert any("duplicate vertex ids" in x for x in validate(K).violations)


def test_genus_two_octagon():
    K = fx.genus2().complex
    assert validate(K).ok
    assert euler_characteristic(K) == -2
    assert f_vector(K) == [2, 12, 8]
    # the centre sees 8 corners, the single octagon-vertex class 16
    counts = sorted(len(traverse_star(K, c.id).incidences) for c in K.face_classes if c.dim == 0)
    assert counts == [8, 16]
    assert all(len(traverse_star(K, c.id).incidences) == 2 for c in K.face_classes if c.dim == 1)


def test_pairing_words_compose_to_relation():
    K = fx.genus2().complex
    assert len(K.relations) >= 1
    assert all(set(map(abs, r)) <= {1, 2, 3, 4} for r in K.relations)


def test_cone_over_cycle_is_a_disc():
    K = build_cone_complex(fx.cycle(5), 0)
    assert euler_characteristic(K, closed=False) == 1
    assert len(K.cusp_classes()) == 1


def test_suspension_of_cycle_is_a_sphere():
    K = suspend(fx.cycle(6), ends=None)
    assert euler_characteristic(K) == 2
    K = suspend(fx.cycle(6))
    assert euler_characteristic(K) == 2
    assert len(K.cusp_classes()) == 2


def test_three_torus_counts():
    K = fx.torus3((2, 2, 2))
    assert validate(K).ok
    assert f_vector(K) == [8, 56, 96, 48]
    assert euler_characteristic(K) == 0


def test_links_of_genus_two_faces_are_spheres():
    K = fx.genus2().complex
    for c in K.face_classes:
        L = link_sphere(K, c.id)
        assert L.is_sphere, (c.id, L.reasons)
        assert L.dim == 1 - c.dim


def test_link_of_four_dimensional_pole_is_a_three_sphere():
    K = fx.star4d().complex
    n = K.find_face(["n"])
    L = link_sphere(K, n)
    assert L.is_sphere
    assert L.betti == (1, 0, 0, 1)


def test_cusp_link_of_cone_end_is_not_a_sphere():
    K = fx.cone4d().complex
    c = K.cusp_classes()[0].id
    with pytest.raises(ValueError):
        traverse_star(K, c)
    L = link_sphere(K, c, allow_cusp=True)
    assert not L.is_sphere


def test_non_cusp_links_of_cone_end_are_spheres():
    K = fx.cone4d().complex
    bad = [c.id for c in K.face_classes if not c.is_cusp and not link_sphere(K, c.id).is_sphere]
    assert bad == []


def test_pinched_vertex_is_not_manifold():
    # two tetrahedron boundaries sharing one vertex
    top = [("b", "c", "d"), ("a", "c", "d"), ("a", "b", "d"), ("a", "b", "c")]
    top2 = [tuple({"a": "a", "b": "x", "c": "y", "d": "z"}[v] for v in t) for t in top]
    K = Complex(2, [VertexRecord(v) for v in "abcdxyz"], top + top2, [1, -1, 1, -1] * 2)
    a = K.find_face(["a"])
    with pytest.raises(NonManifoldError):
        traverse_star(K, a)


def test_one_edge_circle_from_a_pairing():
    K = Complex(1, [VertexRecord("p"), VertexRecord("q")], [("p", "q")],
                pairings=[FacePairing((0, 0), (0, 1), (1, 0), (1,))])
    assert validate(K).ok
    assert euler_characteristic(K) == 0


def test_pairing_that_misses_the_facet_rejected():
    K = Complex(1, [VertexRecord("p"), VertexRecord("q")], [("p", "q")],
                pairings=[FacePairing((0, 0), (0, 1), (0, 1), (1,))])
    assert not validate(K).ok


def test_json_round_trip():
    for K in (fx.genus2().complex, fx.cone4d().complex, suspend(fx.cycle(4))):
        L = complex_from_json(complex_to_json(K))
        assert L.top == K.top
        assert L.orientations == K.orientations
        assert L.pairings == K.pairings
        assert L.vertices == K.vertices
        assert complex_to_json(L) == complex_to_json(K)
