"""Representations, equivariant vertex maps and their development over stars.

Images are attached to vertex ids of the complex (one lift of each top
simplex).  Identified vertices must have images related by the words
recorded by :attr:`Complex.vertex_classes`; missing images are filled in
from the class representative.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .complex import Complex, Incidence, reduce_word, traverse_star
from .minkowski import (
    HPoint,
    Isometry,
    apply_isometry,
    distance,
    exp_map,
    point_from_json,
    point_to_json,
    random_unit_coords,
    tangent_frame,
)
from .simplex import DEGENERACY_RATIO, GeodesicSimplex

MATCH_TOL = 1e-6


class EquivarianceError(ValueError):
    pass


class Representation:
    """Images of the generators of a finitely generated group in Isom(H^m)."""

    def __init__(self, generators, m: int | None = None):
        gens = tuple(g if isinstance(g, Isometry) else Isometry(g) for g in generators)
        if m is None:
            if not gens:
                raise ValueError("dimension needed for a representation without generators")
            m = gens[0].dim
        if any(g.dim != m for g in gens):
            raise ValueError("generators of different dimensions")
        self.generators = gens
        self.m = int(m)

    @classmethod
    def trivial(cls, m: int, count: int) -> "Representation":
        return cls([Isometry.identity(m)] * count, m)

    def conjugate(self, g: Isometry) -> "Representation":
        ginv = g.inverse()
        return Representation([g @ h @ ginv for h in self.generators], self.m)


def evaluate_word(rep: Representation, word) -> Isometry:
    M = np.eye(rep.m + 1)
    for letter in word:
        k = abs(int(letter))
        if letter == 0 or k > len(rep.generators):
            raise IndexError(f"generator index {letter} out of range 1..{len(rep.generators)}")
        g = rep.generators[k - 1]
        M = M @ (g.matrix if letter > 0 else g.inverse().matrix)
    return Isometry(M, check=False)


def _same_point(p, q, tol=MATCH_TOL) -> bool:
    if p.kind != q.kind:
        return False
    if p.kind == "ideal":
        return float(np.abs(p.coords - q.coords).max()) <= tol
    return distance(p, q) <= tol


class EquivariantMap:
    def __init__(self, rep: Representation, images: dict, source: Complex):
        if rep.m != source.dim:
            raise ValueError(f"representation acts on H^{rep.m}, complex has dimension {source.dim}")
        self.rep = rep
        self.source = source
        self.images = dict(images)
        for vid, p in self.images.items():
            if vid not in source._vid:
                raise ValueError(f"image given for unknown vertex {vid!r}")
            if p.dim != rep.m:
                raise ValueError(f"image of {vid!r} lives in H^{p.dim}")
            if p.kind == "ideal" and not source.vertex(vid).is_cusp:
                raise ValueError(f"non-cusp vertex {vid!r} must map to a finite point")
        self._cache: dict = {}

    def image(self, vid: str):
        """Image of a vertex id, transported from its class representative if needed."""
        if vid in self.images:
            return self.images[vid]
        if vid not in self._cache:
            canon, w = self.source.vertex_classes[vid]
            if canon not in self.images:
                raise KeyError(f"no image for vertex {vid!r} or its representative {canon!r}")
            self._cache[vid] = apply_isometry(evaluate_word(self.rep, w), self.images[canon])
        return self._cache[vid]

    def simplex_image(self, s: int, word=()) -> GeodesicSimplex:
        g = evaluate_word(self.rep, word) if word else None
        pts = [self.image(v) for v in self.source.top[s]]
        if g is not None:
            pts = [apply_isometry(g, p) for p in pts]
        return GeodesicSimplex(pts, m=self.rep.m)

    def consistency_errors(self) -> list:
        """Supplied images that disagree with the transported representative image."""
        out = []
        for vid, p in self.images.items():
            canon, w = self.source.vertex_classes[vid]
            if canon == vid or canon not in self.images:
                continue
            q = apply_isometry(evaluate_word(self.rep, w), self.images[canon])
            if not _same_point(p, q):
                out.append(vid)
        return out

    def with_images(self, images: dict) -> "EquivariantMap":
        new = dict(self.images)
        new.update(images)
        return EquivariantMap(self.rep, new, self.source)


@dataclass
class DevelopedStar:
    face: int
    basepoint: HPoint | None
    simplices: list  # (image GeodesicSimplex, Incidence, source orientation)
    bases: list = field(default_factory=list)  # per-incidence image of the face point

    def __len__(self):
        return len(self.simplices)


def _face_point(T: GeodesicSimplex, subset) -> HPoint | None:
    if len(subset) == 1 and T.vertices[subset[0]].kind == "ideal":
        return None
    return HPoint.project(T.reps[list(subset)].sum(axis=0))


def develop_star(F: EquivariantMap, face: int, allow_cusp: bool = False) -> DevelopedStar:
    K = F.source
    cls = K.face_classes[face]
    trav = traverse_star(K, face, allow_cusp=allow_cusp)
    out, bases = [], []
    root_tau = None
    for n, inc in enumerate(trav.incidences):
        T = F.simplex_image(inc.simplex, inc.word)
        tau_pts = [T.vertices[k] for k in inc.tau_order]
        if root_tau is None:
            root_tau = tau_pts
        elif not cls.is_cusp:
            for p, q in zip(tau_pts, root_tau):
                if not _same_point(p, q):
                    raise EquivarianceError(
                        f"face {face}: incidence {n} (simplex {inc.simplex}, word {list(inc.word)}) "
                        "places the face elsewhere"
                    )
        out.append((T, inc, K.orientations[inc.simplex]))
        bases.append(_face_point(T, inc.tau_order))
    if not cls.is_cusp:
        for j, word, _order in trav.closures:
            a = F.simplex_image(trav.incidences[j].simplex, trav.incidences[j].word)
            b = F.simplex_image(trav.incidences[j].simplex, word)
            for p, q in zip(a.vertices, b.vertices):
                if not _same_point(p, q):
                    raise EquivarianceError(f"face {face}: star does not close up under word {list(word)}")
    return DevelopedStar(face, bases[0], out, bases)


def epsilon_sign(image: GeodesicSimplex, source_orientation: int, strict: bool = True) -> int:
    """Orientation of the image relative to the source; 0 if degenerate.

    With ``strict=False`` the raw determinant sign is returned even for
    nearly degenerate images.
    """
    if image.k != image.m:
        raise ValueError("epsilon_sign needs a top-dimensional simplex")
    if strict and image.singular_ratio() <= DEGENERACY_RATIO:
        return 0
    d = np.linalg.det(image.reps)
    if d == 0:
        return 0
    return int(np.sign(d)) * int(source_orientation)


@dataclass
class NondegeneracyReport:
    degenerate: list
    ratios: list

    @property
    def ok(self) -> bool:
        return not self.degenerate


def nondegeneracy_check(F: EquivariantMap) -> NondegeneracyReport:
    ratios, bad = [], []
    for s in range(len(F.source.top)):
        r = F.simplex_image(s).singular_ratio()
        ratios.append(r)
        if r <= DEGENERACY_RATIO:
            bad.append(s)
    return NondegeneracyReport(bad, ratios)


def vertex_class_roots(K: Complex) -> list:
    roots = []
    for v in K.vertices:
        if K.vertex_classes[v.id][0] == v.id:
            roots.append(v.id)
    return roots


def perturb(F: EquivariantMap, radius: float, seed, classes=None) -> EquivariantMap:
    """Move finite vertex images to random points of the radius-r ball.

    ``classes`` lists representative vertex ids to move (default: all
    non-cusp classes).  The radius is uniform in [0, r) and the direction
    uniform, which is not the hyperbolic ball measure but has full support.
    Every vertex of a moved class is updated equivariantly.
    """
    if radius <= 0:
        raise ValueError("radius must be positive")
    K = F.source
    if classes is None:
        classes = [v for v in vertex_class_roots(K) if not K.vertex(v).is_cusp]
    else:
        classes = [K.vertex_classes[v][0] for v in classes]
        classes = [v for v in vertex_class_roots(K) if v in set(classes)]
    rng = np.random.default_rng(seed)
    members: dict = {}
    for v in K.vertices:
        canon, w = K.vertex_classes[v.id]
        members.setdefault(canon, []).append((v.id, w))
    new = {}
    for canon in classes:
        p = F.image(canon)
        u = random_unit_coords(rng, 1, F.rep.m)[0]
        t = radius * rng.random()
        if p.kind == "ideal":
            continue
        q = exp_map(p, t * (tangent_frame(p) @ u))
        for vid, w in members[canon]:
            new[vid] = apply_isometry(evaluate_word(F.rep, w), q) if w else q
    return F.with_images(new)


def post_compose(F: EquivariantMap, g: Isometry) -> EquivariantMap:
    """The map g o f, equivariant for the conjugate representation."""
    images = {v: apply_isometry(g, p) for v, p in F.images.items()}
    return EquivariantMap(F.rep.conjugate(g), images, F.source)


def map_to_json(F: EquivariantMap) -> dict:
    return {
        "generators": [g.matrix.tolist() for g in F.rep.generators],
        "images": {v: point_to_json(p) for v, p in F.images.items()},
    }


def map_from_json(d: dict, K: Complex) -> EquivariantMap:
    rep = Representation([np.array(g, dtype=float) for g in d["generators"]], m=K.dim)
    images = {str(v): point_from_json(p) for v, p in d["images"].items()}
    return EquivariantMap(rep, images, K)


__all__ = [
    "DevelopedStar", "EquivariantMap", "EquivarianceError", "Incidence", "NondegeneracyReport",
    "Representation", "develop_star", "epsilon_sign", "evaluate_word", "map_from_json", "map_to_json",
    "nondegeneracy_check", "perturb", "post_compose", "reduce_word", "vertex_class_roots",
]
