"""Signed angle sums around faces and the local degree of the link map.

The census of a face is the orientation-weighted sum of the interior
angles of all image simplices around one lift of the face.  Sampling uses
a single set of unit directions at the image of the face point for every
simplex in the star, so each direction contributes the signed number of
image cones containing it.  Around a non-cusp face this count is the
same for almost every direction and the estimate has zero spread.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .complex import NonManifoldError, link_sphere
from .develop import EquivariantMap, develop_star, epsilon_sign
from .minkowski import log_direction, metric, random_unit_coords, tangent_coords, tangent_frame
from .simplex import (
    _CHUNK,
    DegenerateSimplexError,
    Estimate,
    MCConfig,
    exact_angle,
    tangent_cone_normals,
)

CERT_SIGMA = 3.0
BOUNDARY_TOL = 1e-9


def round_half_away(x: float) -> int:
    return int(math.copysign(math.floor(abs(x) + 0.5), x))


def certify(value: float, stderr: float) -> tuple[int, bool]:
    """Nearest integer, and whether the rounding is separated by 3 stderr."""
    n = round_half_away(value)
    return n, abs(value - n) + CERT_SIGMA * stderr < 0.5


@dataclass(frozen=True)
class CensusEntry:
    face: int
    dim: int
    value: float
    stderr: float = 0.0
    exact: bool = True
    degree: int | None = None
    cusp: bool = False
    samples: int = 0
    error: str | None = None

    @property
    def nearest(self) -> int:
        return certify(self.value, self.stderr)[0]

    @property
    def certified(self) -> bool:
        return self.error is None and certify(self.value, self.stderr)[1]

    def agrees_with_degree(self) -> bool:
        if self.degree is None:
            return True
        return abs(self.value - self.degree) < CERT_SIGMA * self.stderr + 1e-6


def census(F: EquivariantMap, face: int, cfg: MCConfig | None = None,
           allow_near_degenerate: bool = False) -> CensusEntry:
    K = F.source
    cls = K.face_classes[face]
    dev = develop_star(F, face, allow_cusp=True)
    m = K.dim
    J = metric(m)
    exact_part = 0.0
    blocks = []
    for (T, inc, o), x in zip(dev.simplices, dev.bases):
        eps = epsilon_sign(T, o, strict=not allow_near_degenerate)
        if eps == 0:
            if not allow_near_degenerate:
                raise DegenerateSimplexError(f"face {face}: image of simplex {inc.simplex} is degenerate")
            continue
        tau = T.face(inc.tau_order)
        if tau.is_ideal_vertex():
            continue
        a = exact_angle(T, tau)
        if a is not None:
            exact_part += eps * a
            continue
        if not cls.is_cusp:
            x = dev.basepoint
        normals = tangent_cone_normals(T, tau)
        E = tangent_frame(x)
        blocks.append((eps, E.T @ J @ normals.T))
    if not blocks:
        return CensusEntry(face, cls.dim, float(exact_part), cusp=cls.is_cusp)
    if cfg is None:
        raise ValueError("Monte Carlo census requires an MCConfig with a seed")
    A = np.hstack([b for _, b in blocks])
    starts = np.cumsum([0] + [b.shape[1] for _, b in blocks[:-1]])
    signs = np.array([e for e, _ in blocks], dtype=float)
    rng = cfg.child(1, face).rng()
    s1 = s2 = 0.0
    left = cfg.samples
    while left > 0:
        n = min(left, _CHUNK)
        U = random_unit_coords(rng, n, m)
        inside = (U @ A <= 0.0).astype(np.int8)
        hits = np.minimum.reduceat(inside, starts, axis=1)
        y = hits @ signs
        s1 += y.sum()
        s2 += (y * y).sum()
        left -= n
    N = cfg.samples
    mean = s1 / N
    var = max(s2 / N - mean * mean, 0.0)
    return CensusEntry(face, cls.dim, float(exact_part + mean), float(np.sqrt(var / N)),
                       exact=False, cusp=cls.is_cusp, samples=N)


def link_degree(F: EquivariantMap, face: int, cfg: MCConfig, retries: int = 16) -> int:
    """Signed count of boundary-of-star simplices whose radial image contains a random direction."""
    K = F.source
    cls = K.face_classes[face]
    if cls.is_cusp:
        raise ValueError("degree is not defined at a cusp point")
    L = link_sphere(K, face)
    if not L.is_sphere:
        raise NonManifoldError(f"link of face {face} is not a sphere: {'; '.join(L.reasons)}")
    dev = develop_star(F, face)
    x = dev.basepoint
    m = K.dim
    E = tangent_frame(x)
    Ds, signs = [], []
    for T, inc, o in dev.simplices:
        for i in inc.subset:
            cols = [tangent_coords(E, log_direction(x, T.vertices[k]).v) for k in range(m + 1) if k != i]
            D = np.column_stack(cols)
            d = np.linalg.det(D)
            if abs(d) < 1e-12:
                raise DegenerateSimplexError(f"face {face}: degenerate spherical image of a link simplex")
            Ds.append(D)
            signs.append(o * (-1) ** i * int(np.sign(d)))
    Ds = np.array(Ds)
    signs = np.array(signs)
    rng = cfg.child(2, face).rng()
    for _ in range(retries):
        u = random_unit_coords(rng, 1, m)[0]
        lam = np.linalg.solve(Ds, np.broadcast_to(u, (len(Ds), m))[..., None])[..., 0]
        scale = np.abs(lam).max(axis=1, keepdims=True)
        if np.any(np.abs(lam) <= BOUNDARY_TOL * scale):
            continue
        inside = np.all(lam > 0, axis=1)
        return int(signs[inside].sum())
    raise RuntimeError(f"face {face}: no generic direction found after {retries} attempts")


def _entry(F, face, cfg, degree, allow_near_degenerate):
    cls = F.source.face_classes[face]
    try:
        e = census(F, face, cfg, allow_near_degenerate=allow_near_degenerate)
    except (ValueError, RuntimeError) as exc:
        return CensusEntry(face, cls.dim, float("nan"), float("nan"), False, cusp=cls.is_cusp, error=str(exc))
    if degree and not cls.is_cusp:
        try:
            d = link_degree(F, face, cfg if cfg is not None else MCConfig(0))
        except (ValueError, RuntimeError):
            d = None
        e = CensusEntry(e.face, e.dim, e.value, e.stderr, e.exact, d, e.cusp, e.samples)
    return e


def census_all(F: EquivariantMap, cfg: MCConfig | None = None, faces=None, degree: bool = True,
               threads: int = 1, allow_near_degenerate: bool = False) -> list:
    """One entry per face class, cusp points included.  Errors stay per entry."""
    ids = [c.id for c in F.source.face_classes] if faces is None else list(faces)
    F.source.face_classes, F.source.vertex_classes  # build shared caches before threads start
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(lambda f: _entry(F, f, cfg, degree, allow_near_degenerate), ids))
    return [_entry(F, f, cfg, degree, allow_near_degenerate) for f in ids]


def alternating_sum(entries) -> Estimate:
    value = sum((-1) ** e.dim * e.value for e in entries)
    var = sum(e.stderr ** 2 for e in entries)
    return Estimate(float(value), float(np.sqrt(var)), sum(e.samples for e in entries),
                    exact=all(e.exact for e in entries))


__all__ = [
    "CERT_SIGMA", "CensusEntry", "alternating_sum", "census", "census_all", "certify", "link_degree",
    "round_half_away",
]
