# Interior angles and volumes of geodesic simplices.
#
# In even dimension the alternating sum of interior angles gives the
# volume; in odd dimension it vanishes.  Run: python3 demos/01_simplex_angles.py

import numpy as np

from hypvol.simplex import (
    MCConfig,
    area_defect,
    face_lattice,
    generalized_angle_sum,
    interior_angle,
    random_simplex,
    volume_hopf,
    volume_mc,
)

rng = np.random.default_rng(2024)

# A triangle: every angle is exact, so the angle-sum volume is the area defect.
T = random_simplex(2, rng, radius=2.0)
print("triangle angles (fractions of a full turn):")
for i in range(3):
    print("  vertex", i, interior_angle(T, T.face([i])).value)
print("angle-sum volume", volume_hopf(T).value, " area defect", area_defect(T))

# A 4-simplex: vertex, edge and triangle angles are sampled.
S = random_simplex(4, rng, radius=1.5)
cfg = MCConfig(seed=7, samples=50_000)
for tau in face_lattice(S)[:5]:
    a = interior_angle(S, tau, cfg.child(*tau.indices))
    print("face", tau.indices, f"{a.value:.5f} +- {a.stderr:.5f}")
h = volume_hopf(S, cfg)
m = volume_mc(S, cfg.child(99))
print(f"4-simplex volume: angle sum {h.value:.5f} +- {h.stderr:.5f}, sampled {m.value:.5f} +- {m.stderr:.5f}")

# A tetrahedron: the alternating sum is zero up to noise.
W = generalized_angle_sum(random_simplex(3, rng, radius=1.5), cfg)
print(f"tetrahedron alternating angle sum {W.value:.5f} +- {W.stderr:.5f}")
