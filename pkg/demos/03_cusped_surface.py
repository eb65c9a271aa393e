# The once-punctured torus.
#
# With the square's corners at infinity the cusp contributes nothing and
# the volume is 2 pi.  Pulling the corners in to finite points makes the
# cusp census equal to the cone angle over 2 pi, and the normalized volume
# stops being an integer.  In dimension 2 nothing forbids this.

import math

from hypvol import fixtures as fx
from hypvol.census import census
from hypvol.simplex import MCConfig
from hypvol.volume import gauss_bonnet_check, integrality_report

for theta in (0.0, 1.0, math.pi, 5.0):
    F = fx.punctured_torus(theta).map
    (c,) = F.source.cusp_classes()
    r = integrality_report(F, MCConfig(0))
    gb = gauss_bonnet_check(F)
    print(f"cone angle {theta:.4f}: cusp census {census(F, c.id).value:.6f} "
          f"normalized {r.normalized:.6f} ({r.verdict}) gauss-bonnet {'ok' if gb.ok else 'off'}")
