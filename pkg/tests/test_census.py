import math

import numpy as np
import pytest

from hypvol import fixtures as fx
from hypvol.census import alternating_sum, census, census_all, certify, link_degree, round_half_away
from hypvol.develop import perturb, post_compose
from hypvol.minkowski import reflection
from hypvol.simplex import DegenerateSimplexError, MCConfig


def test_rounding_and_certification():
    assert round_half_away(0.5) == 1
    assert round_half_away(-0.5) == -1
    assert round_half_away(1.49) == 1
    assert certify(2.01, 0.01) == (2, True)
    assert certify(2.4, 0.05) == (2, False)
    assert certify(-0.9, 0.0) == (-1, True)


def test_geometric_genus_two_census_is_one_everywhere():
    entries = census_all(fx.genus2().map)
    assert all(e.exact and e.value == pytest.approx(1.0, abs=1e-9) for e in entries)
    assert all(e.degree == 1 for e in entries)


def test_reflected_map_has_census_minus_one():
    F = post_compose(fx.genus2().map, reflection([0.0, 1.0, 0.0]))
    for e in census_all(F):
        assert e.value == pytest.approx(-1.0, abs=1e-9)
        assert e.degree == -1


def test_winding_star_has_census_two():
    F = fx.winding_sphere().map
    n = F.source.find_face(["n"])
    e = census(F, n)
    assert e.value == pytest.approx(2.0, abs=1e-9)
    assert link_degree(F, n, MCConfig(0)) == 2


def test_winding_sphere_census_matches_degree_everywhere():
    for e in census_all(fx.winding_sphere().map):
        assert e.nearest == e.degree


@pytest.mark.parametrize("seed", range(4))
def test_perturbed_genus_two_census_matches_degree(seed):
    F = perturb(fx.genus2().map, 0.05, seed)
    for e in census_all(F, MCConfig(seed, 20_000)):
        assert e.certified
        assert e.nearest == e.degree


def test_four_dimensional_pole_census_is_exactly_one():
    F = fx.star4d().map
    n = F.source.find_face(["n"])
    e = census(F, n, MCConfig(3, 20_000))
    # every sampled direction lies in exactly one image cone
    assert e.value == 1.0 and e.stderr == 0.0
    assert link_degree(F, n, MCConfig(3)) == 1


def test_four_dimensional_edges_agree_with_degree():
    F = fx.star4d().map
    entries = census_all(F, MCConfig(4, 5_000), faces=range(0, len(F.source.face_classes), 7))
    for e in entries:
        assert e.error is None
        assert e.agrees_with_degree()


def test_census_needs_seed_for_sampling():
    F = fx.star4d().map
    with pytest.raises(ValueError):
        census(F, F.source.find_face(["n"]))


def test_degenerate_image_reported_per_entry():
    f0 = fx.cone4d().map
    with pytest.raises(DegenerateSimplexError):
        census(f0, 1, MCConfig(0, 100))
    entries = census_all(f0, MCConfig(0, 100), faces=[0, 1], degree=False)
    assert all(e.error and "degenerate" in e.error for e in entries)
    assert all(math.isnan(e.value) for e in entries)


def test_threads_do_not_change_results():
    F = perturb(fx.genus2().map, 0.05, 9)
    a = census_all(F, MCConfig(1, 2_000))
    b = census_all(F, MCConfig(1, 2_000), threads=4)
    assert a == b


def test_alternating_sum_of_geometric_surface():
    # 2 vertices - 12 edges + 8 triangles
    s = alternating_sum(census_all(fx.genus2().map, degree=False))
    assert s.value == pytest.approx(-2.0, abs=1e-9)
    assert s.exact


def test_cusp_census_of_complete_punctured_torus_is_zero():
    F = fx.punctured_torus().map
    (c,) = F.source.cusp_classes()
    assert census(F, c.id).value == 0.0
    with pytest.raises(ValueError):
        link_degree(F, c.id, MCConfig(0))


@pytest.mark.parametrize("theta", [1.0, math.pi, 5.0])
def test_cusp_census_of_cone_point_is_its_angle(theta):
    F = fx.punctured_torus(theta).map
    (c,) = F.source.cusp_classes()
    assert census(F, c.id).value == pytest.approx(theta / (2 * math.pi), abs=1e-9)


def test_shared_directions_make_estimates_reproducible():
    F = perturb(fx.star4d().map, 0.05, 1)
    cfg = MCConfig(12, 3_000)
    assert census(F, 5, cfg) == census(F, 5, cfg)
    assert np.isfinite(census(F, 5, cfg).value)
