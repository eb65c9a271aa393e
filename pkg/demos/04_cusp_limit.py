# A 4-dimensional cusp whose cross-section is a flat 3-torus.
#
# f0 flattens every simplex into a plane fixed by the holonomy.  Small
# perturbations f_k (radius delta / k) are non-degenerate; the cusp census
# of f_k is what the limit argument controls.  Two placements of the
# cross-section images are compared: on a short arc the apex image is a
# corner of every flattened simplex and the census vanishes; spread around
# the apex it does not.

from hypvol import fixtures as fx
from hypvol.cusp import CuspExperiment, cusp_limit_experiment
from hypvol.simplex import MCConfig

cfg = MCConfig(seed=3, samples=20_000)
for label, arc in (("arc", 1.5), ("surrounding", fx.CIRCLE_ARC)):
    E = CuspExperiment.from_f0(fx.cone4d(arc=arc).map, seed=3)
    S = cusp_limit_experiment(E, (1, 2, 4, 8, 16), cfg, totals=False)
    apex = E.complex.find_face(["c0"])
    print(f"{label}: delta = {E.delta:.4f}")
    for row in S.rows:
        e = row.cusp[apex]
        print(f"  k={row.k:2d} r={row.radius:.5f} cusp census {e.value:+.4f} +- {e.stderr:.4f}")

# The double cover of the torus end multiplies the cusp census by two.
from hypvol.cusp import covering_relation_check

base, cover, vm, d = fx.cover_pair_4d(seed=0)
R = covering_relation_check(base.map, cover.map, vm, d, cfg)
for fb, fc, eb, ec, ok in R.pairs:
    print(f"cover: {d} x {eb.value:.4f} vs {ec.value:.4f} ->", "ok" if ok else "mismatch")
