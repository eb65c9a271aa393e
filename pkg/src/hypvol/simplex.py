"""Geodesic simplices, interior angle fractions and volumes.

The interior angle of a top-dimensional simplex T at a face tau is the
fraction of the unit tangent sphere at an interior point of tau that
points into T.  Since the fraction does not depend on the point or on
the radius, it is computed on the tangent cone cut out by the facets of
T containing tau.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .minkowski import (
    HPoint,
    IdealPoint,
    exp_map,
    log_direction,
    lorentz_dot,
    metric,
    point_from_json,
    point_to_json,
    random_unit_coords,
    tangent_frame,
)

DEGENERACY_RATIO = 1e-8
DEFAULT_SAMPLES = 200_000
_CHUNK = 50_000


class DegenerateSimplexError(ValueError):
    pass


class NoBasepointError(ValueError):
    """Raised for a face consisting of a single ideal vertex."""


class UnsupportedError(ValueError):
    pass


@dataclass(frozen=True)
class Estimate:
    """A real value carrying a Monte Carlo standard error."""

    value: float
    stderr: float = 0.0
    samples: int = 0
    exact: bool = True

    def __post_init__(self):
        if self.stderr < 0:
            raise ValueError("stderr must be nonnegative")
        if self.exact and self.stderr != 0:
            raise ValueError("exact estimates carry no stderr")

    def scaled(self, c: float) -> "Estimate":
        return Estimate(c * self.value, abs(c) * self.stderr, self.samples, self.exact)


@dataclass(frozen=True)
class AngleEstimate(Estimate):
    def __post_init__(self):
        super().__post_init__()
        if not 0.0 <= self.value <= 1.0:
            raise ValueError(f"angle fraction {self.value} outside [0, 1]")


def combine(terms: Sequence[tuple[float, Estimate]]) -> Estimate:
    """Linear combination sum c_i * e_i of independent estimates."""
    value = sum(c * e.value for c, e in terms)
    var = sum((c * e.stderr) ** 2 for c, e in terms)
    return Estimate(
        float(value),
        float(np.sqrt(var)),
        samples=sum(e.samples for _, e in terms),
        exact=all(e.exact for _, e in terms),
    )


@dataclass(frozen=True)
class MCConfig:
    seed: int | Sequence[int]
    samples: int = DEFAULT_SAMPLES

    def child(self, *key: int) -> "MCConfig":
        base = list(self.seed) if isinstance(self.seed, (list, tuple)) else [int(self.seed)]
        return MCConfig(tuple(base + [int(k) for k in key]), self.samples)

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed)


class GeodesicSimplex:
    """Ordered vertices (finite or ideal) spanning a geodesic simplex in H^m."""

    def __init__(self, vertices, m: int | None = None):
        vertices = tuple(vertices)
        if not vertices:
            raise ValueError("a simplex needs at least one vertex")
        dims = {v.dim for v in vertices}
        if len(dims) != 1:
            raise ValueError("vertices live in different dimensions")
        self.m = dims.pop() if m is None else m
        if len(vertices) - 1 > self.m:
            raise ValueError("too many vertices for the ambient dimension")
        self.vertices = vertices
        self.reps = np.array([v.coords for v in vertices])
        self.reps.setflags(write=False)

    @property
    def k(self) -> int:
        return len(self.vertices) - 1

    def __len__(self):
        return len(self.vertices)

    def singular_ratio(self) -> float:
        s = np.linalg.svd(self.reps, compute_uv=False)
        return float(s[-1] / s[0])

    def is_degenerate(self) -> bool:
        return self.singular_ratio() <= DEGENERACY_RATIO

    def face(self, indices) -> "Face":
        return Face(self, tuple(sorted(indices)))

    def top(self) -> "Face":
        return self.face(range(len(self)))

    def ideal_mask(self) -> np.ndarray:
        return np.array([isinstance(v, IdealPoint) for v in self.vertices])

    def __repr__(self):
        return f"GeodesicSimplex(m={self.m}, vertices={list(self.vertices)!r})"


@dataclass(frozen=True)
class Face:
    parent: GeodesicSimplex
    indices: tuple

    def __post_init__(self):
        idx = tuple(self.indices)
        if not idx or list(idx) != sorted(set(idx)) or idx[0] < 0 or idx[-1] >= len(self.parent):
            raise ValueError(f"bad face indices {idx}")

    @property
    def dim(self) -> int:
        return len(self.indices) - 1

    @property
    def codim(self) -> int:
        return self.parent.m - self.dim

    @property
    def vertices(self):
        return [self.parent.vertices[i] for i in self.indices]

    def is_ideal_vertex(self) -> bool:
        return self.dim == 0 and isinstance(self.parent.vertices[self.indices[0]], IdealPoint)


def face_lattice(T: GeodesicSimplex) -> list[Face]:
    n = len(T)
    return [T.face(c) for d in range(1, n + 1) for c in itertools.combinations(range(n), d)]


def interior_basepoint(tau: Face) -> HPoint:
    if tau.is_ideal_vertex():
        raise NoBasepointError("a single ideal vertex has no interior point")
    return HPoint.project(tau.parent.reps[list(tau.indices)].sum(axis=0))


def _check_top(T: GeodesicSimplex):
    if T.k != T.m:
        raise ValueError(f"expected a top-dimensional simplex, got a {T.k}-simplex in H^{T.m}")
    if T.is_degenerate():
        raise DegenerateSimplexError(f"degenerate simplex (singular ratio {T.singular_ratio():.3g})")


def facet_normal(T: GeodesicSimplex, opposite: int) -> np.ndarray:
    """Unit normal of the facet missing vertex `opposite`, pointing away from T."""
    J = metric(T.m)
    F = np.delete(T.reps, opposite, axis=0)
    s = np.linalg.svd(F, compute_uv=False)
    if s[-1] <= DEGENERACY_RATIO * s[0]:
        raise DegenerateSimplexError(f"facet opposite vertex {opposite} is degenerate")
    _, _, Vt = np.linalg.svd(F @ J)
    n = Vt[-1]
    q = lorentz_dot(n, n)
    if q <= 0:
        raise DegenerateSimplexError("facet does not span a hyperbolic hyperplane")
    n = n / np.sqrt(q)
    if lorentz_dot(n, T.reps[opposite]) > 0:
        n = -n
    return n


def tangent_cone_normals(T: GeodesicSimplex, tau: Face) -> np.ndarray:
    """Normals of the facets of T containing tau, as rows.

    The tangent cone of T at any interior point of tau is
    {v : <n, v> <= 0 for every returned n}.
    """
    _check_top(T)
    rows = [facet_normal(T, j) for j in range(len(T)) if j not in tau.indices]
    return np.array(rows).reshape(len(rows), T.m + 1)


def _angle_2d(T: GeodesicSimplex, i: int, x: HPoint | None = None) -> float:
    """Angle in radians at vertex i of a triangle in H^2."""
    if isinstance(T.vertices[i], IdealPoint):
        return 0.0
    x = T.vertices[i] if x is None else x
    a, b = (log_direction(x, T.vertices[j]).v for j in range(3) if j != i)
    c = np.clip(lorentz_dot(a, b), -1.0, 1.0)
    return float(np.arccos(c))


def exact_angle(T: GeodesicSimplex, tau: Face) -> float | None:
    """Closed-form angle fraction when one is used, otherwise None."""
    if tau.is_ideal_vertex():
        return 0.0
    if tau.codim == 0:
        return 1.0
    if tau.codim == 1:
        return 0.5
    if T.m == 2:
        return _angle_2d(T, tau.indices[0]) / (2 * np.pi)
    return None


def cone_hit_matrix(x: HPoint, normals: np.ndarray, U: np.ndarray, E: np.ndarray | None = None) -> np.ndarray:
    """Boolean membership of unit tangent directions U (frame coordinates) in a cone."""
    E = tangent_frame(x) if E is None else E
    A = E.T @ metric(x.dim) @ normals.T  # (m, c)
    return np.all(U @ A <= 0.0, axis=1)


def interior_angle(T: GeodesicSimplex, tau: Face, cfg: MCConfig | None = None,
                   method: str = "auto", basepoint: HPoint | None = None) -> AngleEstimate:
    """Interior angle fraction W(T, tau).

    ``method="auto"`` uses the closed forms for ideal vertices, facets, the
    full simplex and every face in H^2; everything else is Monte Carlo with
    ``cfg.samples`` uniform tangent directions.  ``method="mc"`` forces
    sampling (except at ideal vertices).
    """
    if tau.is_ideal_vertex():
        return AngleEstimate(0.0)
    _check_top(T)
    if method == "auto":
        a = exact_angle(T, tau)
        if a is not None:
            if T.m == 2 and tau.codim == 2 and basepoint is not None:
                a = _angle_2d(T, tau.indices[0], basepoint) / (2 * np.pi)
            return AngleEstimate(min(max(a, 0.0), 1.0))
    elif method != "mc":
        raise ValueError(f"unknown method {method!r}")
    if cfg is None:
        raise ValueError("Monte Carlo angle requires an MCConfig with a seed")
    x = interior_basepoint(tau) if basepoint is None else basepoint
    normals = tangent_cone_normals(T, tau)
    E = tangent_frame(x)
    rng = cfg.rng()
    hits = 0
    left = cfg.samples
    while left > 0:
        n = min(left, _CHUNK)
        U = random_unit_coords(rng, n, T.m)
        hits += int(cone_hit_matrix(x, normals, U, E).sum())
        left -= n
    p = hits / cfg.samples
    return AngleEstimate(p, float(np.sqrt(p * (1 - p) / cfg.samples)), cfg.samples, exact=False)


def generalized_angle_sum(T: GeodesicSimplex, cfg: MCConfig | None = None) -> Estimate:
    """Alternating sum of interior angles over all faces of T."""
    _check_top(T)
    terms = []
    for idx, tau in enumerate(face_lattice(T)):
        sub = None if cfg is None else cfg.child(idx)
        terms.append(((-1.0) ** tau.dim, interior_angle(T, tau, sub)))
    return combine(terms)


def sphere_volume(d: int) -> float:
    """Volume of the unit d-sphere."""
    return 2 * math.pi ** ((d + 1) / 2) / math.gamma((d + 1) / 2)


def volume_hopf(T: GeodesicSimplex, cfg: MCConfig | None = None) -> Estimate:
    if T.m % 2:
        raise UnsupportedError("the angle-sum volume formula needs even dimension")
    W = generalized_angle_sum(T, cfg)
    return W.scaled((-1) ** (T.m // 2) * sphere_volume(T.m) / 2)


def volume_mc(T: GeodesicSimplex, cfg: MCConfig) -> Estimate:
    """Brute-force volume by sampling the simplex in the Klein chart."""
    if T.ideal_mask().any():
        raise UnsupportedError("volume_mc does not handle ideal vertices")
    _check_top(T)
    m = T.m
    K = T.reps[:, 1:] / T.reps[:, :1]
    euclid = abs(np.linalg.det(K[1:] - K[0])) / math.factorial(m)
    rng = cfg.rng()
    total = total2 = 0.0
    left = cfg.samples
    while left > 0:
        n = min(left, _CHUNK)
        B = rng.dirichlet(np.ones(m + 1), n)
        P = B @ K
        dens = (1.0 - np.einsum("ij,ij->i", P, P)) ** (-(m + 1) / 2)
        total += dens.sum()
        total2 += (dens ** 2).sum()
        left -= n
    N = cfg.samples
    mean = total / N
    var = max(total2 / N - mean ** 2, 0.0)
    return Estimate(float(euclid * mean), float(euclid * np.sqrt(var / N)), N, exact=False)


def area_defect(T: GeodesicSimplex) -> float:
    """pi minus the angle sum of a triangle in H^2."""
    if T.m != 2:
        raise UnsupportedError("area_defect is only defined in H^2")
    _check_top(T)
    return float(np.pi - sum(_angle_2d(T, i) for i in range(3)))


def random_simplex(m: int, rng: np.random.Generator, radius: float = 1.0, center: HPoint | None = None) -> GeodesicSimplex:
    """m+1 points at random distance < radius from a centre, in random directions."""
    x = HPoint.origin(m) if center is None else center
    E = tangent_frame(x)
    while True:
        V = random_unit_coords(rng, m + 1, m) * (radius * (0.3 + 0.7 * rng.random((m + 1, 1))))
        # reject shapes that are badly conditioned in the tangent space, whatever the size
        s = np.linalg.svd(V[1:] - V[0], compute_uv=False)
        if s[-1] > 1e-3 * s[0]:
            return GeodesicSimplex([exp_map(x, E @ v) for v in V])


def simplex_to_json(T: GeodesicSimplex) -> dict:
    return {"ambient_dim": T.m, "vertices": [point_to_json(v) for v in T.vertices]}


def simplex_from_json(d: dict) -> GeodesicSimplex:
    return GeodesicSimplex([point_from_json(v) for v in d["vertices"]], m=int(d["ambient_dim"]))


__all__ = [
    "AngleEstimate", "DegenerateSimplexError", "Estimate", "Face", "GeodesicSimplex", "MCConfig",
    "NoBasepointError", "UnsupportedError", "area_defect", "combine", "cone_hit_matrix",
    "exact_angle", "face_lattice", "facet_normal", "generalized_angle_sum", "interior_angle",
    "interior_basepoint", "random_simplex", "simplex_from_json", "simplex_to_json", "sphere_volume",
    "tangent_cone_normals", "volume_hopf", "volume_mc",
]
