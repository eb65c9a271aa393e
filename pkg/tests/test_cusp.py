import numpy as np
import pytest

from hypvol import fixtures as fx
from hypvol.cusp import (
    CuspExperiment,
    ToricTarget,
    build_f0,
    covering_problems,
    covering_relation_check,
    cusp_limit_experiment,
    delta_threshold,
    moved_classes,
    perturbed_family_member,
)
from hypvol.develop import nondegeneracy_check
from hypvol.minkowski import HPoint, IdealPoint, distance, exp_map
from hypvol.simplex import MCConfig

PLANE = (HPoint.origin(4), np.eye(5)[1], np.eye(5)[2])


def test_toric_target_validation():
    ToricTarget(IdealPoint([1.0, 1.0, 0, 0, 0]), PLANE)
    with pytest.raises(ValueError):
        ToricTarget(IdealPoint([1.0, 0, 0, 1.0, 0]), PLANE)  # off the plane
    with pytest.raises(ValueError):
        ToricTarget(HPoint.origin(4), (HPoint.origin(4), np.eye(5)[1], 2 * np.eye(5)[2]))
    with pytest.raises(ValueError):
        ToricTarget(HPoint.origin(4), (HPoint.origin(4), np.eye(5)[0], np.eye(5)[2]))


def test_build_f0_reproduces_the_cone_fixture():
    f = fx.cone4d()
    K = f.complex
    targets = {0: ToricTarget(HPoint.origin(4), PLANE), 1: ToricTarget(IdealPoint([1.0, 1.0, 0, 0, 0]), PLANE)}
    F0 = build_f0(K, f.map.rep, targets, {v: p for v, p in f.map.images.items() if not K.vertex(v).is_cusp})
    for v in K.vertices:
        assert np.allclose(F0.image(v.id).coords, f.map.image(v.id).coords)
    off = dict(f.map.images)
    off["t000"] = exp_map(HPoint.origin(4), np.array([0, 0, 0, 0.5, 0]))
    with pytest.raises(ValueError):
        build_f0(K, f.map.rep, targets, {v: p for v, p in off.items() if not K.vertex(v).is_cusp})
    with pytest.raises(ValueError):
        build_f0(K, f.map.rep, {0: targets[0]}, {})


def test_delta_threshold_quarter_of_quarter_min_distance():
    F0 = fx.cone4d().map
    d = min(
        distance(p, q)
        for s in range(len(F0.source.top))
        for i, p in enumerate(F0.simplex_image(s).vertices)
        for q in F0.simplex_image(s).vertices[i + 1:]
        if p.kind == q.kind == "finite"
    )
    assert delta_threshold(F0) == pytest.approx(d / 16)


def test_perturbed_family_is_nondegenerate_and_close():
    E = CuspExperiment.from_f0(fx.cone4d().map, seed=3)
    for k in (1, 4):
        Fk, attempts = perturbed_family_member(E, k)
        assert attempts >= 1
        assert nondegeneracy_check(Fk).ok
        for v in moved_classes(E.complex):
            assert distance(Fk.image(v), E.f0.image(v)) < E.delta / k


def test_ideal_end_has_zero_census():
    E = CuspExperiment.from_f0(fx.cone4d().map, seed=0)
    S = cusp_limit_experiment(E, (1, 2), MCConfig(0, 2_000), totals=False)
    ideal = E.complex.find_face(["c1"])
    assert all(row.cusp[ideal].value == 0.0 for row in S.rows)


def test_arc_placement_gives_vanishing_cusp_census():
    E = CuspExperiment.from_f0(fx.cone4d().map, seed=1)
    S = cusp_limit_experiment(E, (1, 2, 4, 8, 16), MCConfig(1, 5_000), totals=False)
    for row in S.rows:
        for e in row.cusp.values():
            assert e.value == 0.0
    assert all(S.envelope_ok.values())


def test_surrounding_placement_does_not_vanish():
    # cross-section images spread around the apex image: the apex stops being
    # a corner of the flattened simplices and the cusp census stays near
    # nonzero integers instead of shrinking with the perturbation radius
    E = CuspExperiment.from_f0(fx.cone4d(arc=fx.CIRCLE_ARC).map, seed=0)
    S = cusp_limit_experiment(E, (1, 2, 4, 8), MCConfig(0, 20_000), totals=False)
    apex = E.complex.find_face(["c0"])
    vals = [row.cusp[apex] for row in S.rows]
    assert any(e.certified and e.nearest != 0 for e in vals)
    for e in vals:
        assert abs(e.value - e.nearest) < 4 * e.stderr + 1e-9


def test_two_dimensional_covering_relation():
    base, cover, vm, d = fx.cover_pair_2d()
    R = covering_relation_check(base.map, cover.map, vm, d, MCConfig(0))
    assert R.ok and R.combinatorial == []
    for _fb, _fc, eb, ec, _ok in R.pairs:
        assert ec.value == pytest.approx(2 * eb.value, abs=1e-9)


def test_identity_covering_is_exact():
    f = fx.cone2d()
    vm = {v.id: v.id for v in f.complex.vertices}
    R = covering_relation_check(f.map, f.map, vm, 1, MCConfig(0))
    assert R.ok
    assert all(eb.value == ec.value for _a, _b, eb, ec, _ok in R.pairs)


def test_wrong_degree_detected_combinatorially():
    base, cover, vm, _d = fx.cover_pair_2d()
    assert covering_problems(base.complex, cover.complex, vm, 3)
    bad = dict(vm)
    bad.pop("u4")
    assert any("not mapped" in p for p in covering_problems(base.complex, cover.complex, bad, 2))


def test_four_dimensional_covering_relation():
    base, cover, vm, d = fx.cover_pair_4d(seed=0)
    R = covering_relation_check(base.map, cover.map, vm, d, MCConfig(0, 20_000))
    assert R.ok, R.pairs
