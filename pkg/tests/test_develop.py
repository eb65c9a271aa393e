import numpy as np
import pytest

from hypvol import fixtures as fx
from hypvol.develop import (
    EquivariantMap,
    EquivarianceError,
    Representation,
    develop_star,
    epsilon_sign,
    evaluate_word,
    map_from_json,
    map_to_json,
    nondegeneracy_check,
    perturb,
    post_compose,
    vertex_class_roots,
)
from hypvol.minkowski import HPoint, distance, random_isometry, reflection, rotation


def test_evaluate_word_multiplies_in_order():
    F = fx.genus2().map
    g1, g2 = F.rep.generators[:2]
    M = evaluate_word(F.rep, [1, -2]).matrix
    assert np.allclose(M, (g1 @ g2.inverse()).matrix)
    assert np.allclose(evaluate_word(F.rep, []).matrix, np.eye(3))
    with pytest.raises(IndexError):
        evaluate_word(F.rep, [5])


def test_genus_two_relation_holds():
    F = fx.genus2().map
    for r in F.source.relations:
        assert np.abs(evaluate_word(F.rep, r).matrix - np.eye(3)).max() < 1e-9


def test_representation_dimensions_checked():
    K = fx.genus2().complex
    with pytest.raises(ValueError):
        EquivariantMap(Representation.trivial(3, 4), {}, K)
    with pytest.raises(ValueError):
        EquivariantMap(Representation.trivial(2, 4), {"nope": HPoint.origin(2)}, K)


def test_images_transported_from_representatives():
    F = fx.genus2().map
    roots = vertex_class_roots(F.source)
    G = EquivariantMap(F.rep, {v: F.images[v] for v in roots}, F.source)
    for v in F.source.vertices:
        assert distance(F.image(v.id), G.image(v.id)) < 1e-9
    assert F.consistency_errors() == []


def test_inconsistent_images_reported():
    F = fx.genus2().map
    G = F.with_images({"P3": HPoint.origin(2)})
    assert G.consistency_errors() == ["P3"]


def test_star_that_does_not_close_raises():
    F = fx.genus2().map
    gens = list(F.rep.generators)
    gens[0] = gens[0] @ rotation(2, 1, 2, 0.05)
    G = EquivariantMap(Representation(gens), {"O": F.images["O"], "P0": F.images["P0"]}, F.source)
    p = G.source.find_face(["P0"])
    with pytest.raises(EquivarianceError):
        develop_star(G, p)


def test_develop_star_places_face_once():
    F = fx.genus2().map
    p = F.source.find_face(["P0"])
    dev = develop_star(F, p)
    assert len(dev.simplices) == 16
    for T, inc, _o in dev.simplices:
        x = T.vertices[inc.tau_order[0]]
        assert distance(x, dev.basepoint) < 1e-9


def test_epsilon_sign_flips_with_orientation_and_reflection():
    F = fx.genus2().map
    T = F.simplex_image(0)
    e = epsilon_sign(T, 1)
    assert e in (1, -1)
    assert epsilon_sign(T, -1) == -e
    G = post_compose(F, reflection([0.0, 1.0, 0.0]))
    assert epsilon_sign(G.simplex_image(0), 1) == -e


def test_nondegeneracy_report():
    F = fx.genus2().map
    assert nondegeneracy_check(F).ok
    f0 = fx.cone4d().map
    rep = nondegeneracy_check(f0)
    assert not rep.ok
    assert len(rep.degenerate) == len(f0.source.top)


@pytest.mark.parametrize("seed", range(5))
def test_perturb_stays_within_radius_and_equivariant(seed):
    F = fx.genus2().map
    G = perturb(F, 0.05, seed)
    for v in vertex_class_roots(F.source):
        assert distance(F.image(v), G.image(v)) < 0.05
    assert G.consistency_errors() == []
    assert nondegeneracy_check(G).ok


def test_perturb_is_seeded_and_keeps_ideal_images():
    # every vertex of the punctured torus maps to infinity, so nothing moves
    F = fx.punctured_torus().map
    G = perturb(F, 0.1, 3)
    for v in F.source.vertices:
        assert np.array_equal(G.image(v.id).coords, F.image(v.id).coords)
    H1 = perturb(fx.genus2().map, 0.05, (1, 2))
    H2 = perturb(fx.genus2().map, 0.05, (1, 2))
    assert all(np.array_equal(H1.image(v.id).coords, H2.image(v.id).coords) for v in H1.source.vertices)
    with pytest.raises(ValueError):
        perturb(F, 0.0, 1)


def test_post_compose_conjugates_representation():
    F = fx.genus2().map
    g = random_isometry(2, np.random.default_rng(0))
    G = post_compose(F, g)
    assert G.consistency_errors() == []
    p = G.source.find_face(["P0"])
    develop_star(G, p)


def test_map_json_round_trip():
    F = fx.punctured_torus().map
    G = map_from_json(map_to_json(F), F.source)
    for v in F.source.vertices:
        assert np.array_equal(F.image(v.id).coords, G.image(v.id).coords)
    for a, b in zip(F.rep.generators, G.rep.generators):
        assert np.array_equal(a.matrix, b.matrix)
