"""Cusp experiments: degenerate base maps, shrinking perturbations and covers."""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .census import CERT_SIGMA, CensusEntry, alternating_sum, census, census_all
from .complex import Complex, perm_parity
from .develop import EquivariantMap, nondegeneracy_check, perturb, vertex_class_roots
from .minkowski import HPoint, IdealPoint, distance, lorentz_dot
from .simplex import Estimate, MCConfig

log = logging.getLogger(__name__)

PLANE_TOL = 1e-9


@dataclass
class ToricTarget:
    """Target data for one end: the apex image and optionally an invariant H^2.

    ``plane`` is (basepoint, t1, t2) with t1, t2 orthonormal tangent
    vectors at the basepoint spanning the plane.
    """

    eta: HPoint | IdealPoint
    plane: tuple | None = None

    def __post_init__(self):
        if self.plane is None:
            return
        x, t1, t2 = self.plane
        t1, t2 = np.asarray(t1, float), np.asarray(t2, float)
        gram = np.array([[lorentz_dot(a, b) for b in (t1, t2)] for a in (t1, t2)])
        if np.abs(gram - np.eye(2)).max() > PLANE_TOL:
            raise ValueError("plane tangent vectors are not orthonormal")
        if max(abs(lorentz_dot(x, t1)), abs(lorentz_dot(x, t2))) > PLANE_TOL:
            raise ValueError("plane tangent vectors are not tangent at the basepoint")
        self.plane = (x, t1, t2)
        if not self.contains(self.eta):
            raise ValueError("eta does not lie on the plane")

    def contains(self, p) -> bool:
        if self.plane is None:
            return True
        x, t1, t2 = self.plane
        B = np.array([x.coords, t1, t2])
        v = p.coords
        # Lorentz-orthogonal projection onto span(x, t1, t2)
        G = np.array([[lorentz_dot(a, b) for b in B] for a in B])
        c = np.linalg.solve(G, np.array([lorentz_dot(a, v) for a in B]))
        return float(np.abs(v - c @ B).max()) <= PLANE_TOL * max(1.0, float(np.abs(v).max()))


def _injective(points) -> bool:
    for i in range(len(points)):
        for j in range(i + 1, len(points)):
            p, q = points[i], points[j]
            if p.kind != q.kind:
                continue
            if p.kind == "ideal":
                if np.abs(p.coords - q.coords).max() < 1e-12:
                    return False
            elif distance(p, q) < 1e-12:
                return False
    return True


def build_f0(K: Complex, rep, targets: dict, images: dict) -> EquivariantMap:
    """Equivariant map sending each cusp to its target and end vertices into the end's plane."""
    imgs = dict(images)
    for v in K.vertices:
        if v.is_cusp:
            if v.end not in targets:
                raise ValueError(f"no target supplied for end {v.end}")
            imgs[v.id] = targets[v.end].eta
    F = EquivariantMap(rep, imgs, K)
    for e, tgt in targets.items():
        for vid in sorted(K.end_vertices(e)):
            if not tgt.contains(F.image(vid)):
                raise ValueError(f"image of {vid} is off the plane of end {e}")
    for s in range(len(K.top)):
        if not _injective(F.simplex_image(s).vertices):
            raise ValueError(f"f0 is not injective on the vertices of simplex {s}")
    return F


def delta_threshold(F0: EquivariantMap) -> float:
    """delta = d0 / 4 with d0 a quarter of the smallest vertex distance inside a simplex image."""
    dmin = np.inf
    for s in range(len(F0.source.top)):
        pts = F0.simplex_image(s).vertices
        if not _injective(pts):
            return 0.0
        for i in range(len(pts)):
            for j in range(i + 1, len(pts)):
                if pts[i].kind == "finite" and pts[j].kind == "finite":
                    dmin = min(dmin, distance(pts[i], pts[j]))
    if not np.isfinite(dmin):
        return 0.0
    return float(dmin / 4 / 4)


@dataclass
class CuspExperiment:
    complex: Complex
    f0: EquivariantMap
    delta: float
    seed: int
    classes: list | None = None  # vertex classes moved by the perturbations

    @classmethod
    def from_f0(cls, f0: EquivariantMap, seed: int, delta: float | None = None) -> "CuspExperiment":
        if delta is None:
            delta = delta_threshold(f0)
        if delta <= 0:
            raise ValueError("f0 is not injective on some simplex")
        return cls(f0.source, f0, delta, seed)


@dataclass
class LimitRow:
    k: int
    radius: float
    cusp: dict  # face id -> CensusEntry
    total: Estimate | None = None
    attempts: int = 1


@dataclass
class LimitSeries:
    rows: list
    C: dict  # fitted envelope constant per cusp face
    envelope_ok: dict
    delta: float
    notes: list = field(default_factory=list)

    def total_spread(self) -> tuple[float, float]:
        """Largest pairwise difference of totals and the combined stderr of that pair."""
        worst, se = 0.0, 0.0
        tot = [r.total for r in self.rows if r.total is not None]
        for i in range(len(tot)):
            for j in range(i + 1, len(tot)):
                d = abs(tot[i].value - tot[j].value)
                if d > worst:
                    worst, se = d, float(np.hypot(tot[i].stderr, tot[j].stderr))
        return worst, se


def perturbed_family_member(E: CuspExperiment, k: int, retries: int = 5):
    """f_k within delta/k of f0, resampled while any image is degenerate."""
    r = E.delta / k
    for attempt in range(retries + 1):
        Fk = perturb(E.f0, r, (E.seed, k, attempt), classes=E.classes)
        if nondegeneracy_check(Fk).ok:
            return Fk, attempt + 1
        log.info("f_%d degenerate on attempt %d, resampling", k, attempt + 1)
    raise RuntimeError(f"f_{k} stayed degenerate after {retries + 1} attempts")


def cusp_limit_experiment(E: CuspExperiment, ks=(1, 2, 4, 8, 16), cfg: MCConfig | None = None,
                          totals: bool = True, threads: int = 1) -> LimitSeries:
    """Cusp censuses of f_k for the schedule r_k = delta / k.

    With ``totals`` the full alternating census sum is recorded for each k.
    The envelope |value| <= C r_k + 3 stderr uses a least squares fit of C.
    """
    cfg = cfg or MCConfig(E.seed)
    K = E.complex
    cusp_faces = [c.id for c in K.cusp_classes()]
    rows = []
    for k in ks:
        Fk, attempts = perturbed_family_member(E, k)
        sub = cfg.child(k)
        if totals:
            entries = census_all(Fk, sub, degree=False, threads=threads)
            bad = [e for e in entries if e.error]
            if bad:
                raise RuntimeError(f"census failed for f_{k}: {bad[0].error}")
            total = alternating_sum(entries)
            cusp = {e.face: e for e in entries if e.cusp}
        else:
            total = None
            cusp = {f: census(Fk, f, sub) for f in cusp_faces}
        rows.append(LimitRow(k, E.delta / k, cusp, total, attempts))
    C, ok = {}, {}
    r = np.array([row.radius for row in rows])
    for f in cusp_faces:
        v = np.array([abs(row.cusp[f].value) for row in rows])
        se = np.array([row.cusp[f].stderr for row in rows])
        C[f] = float(r @ v / (r @ r))
        ok[f] = bool(np.all(v <= C[f] * r + CERT_SIGMA * se + 1e-12))
    return LimitSeries(rows, C, ok, E.delta)


@dataclass
class CoveringReport:
    ok: bool
    degree: int
    combinatorial: list  # problems found while validating the covering
    pairs: list = field(default_factory=list)  # (base face, cover face, base entry, cover entry, ok)


def _class_key(K: Complex, vids) -> tuple:
    return tuple(K.vertex_classes[v][0] for v in vids)


def covering_problems(base: Complex, cover: Complex, vertex_map: dict, d: int) -> list:
    """Check that every base simplex has d preimages, counted with orientation."""
    problems = []
    for v in cover.vertices:
        if v.id not in vertex_map:
            problems.append(f"cover vertex {v.id} is not mapped")
        elif vertex_map[v.id] not in base._vid:
            problems.append(f"cover vertex {v.id} maps to unknown {vertex_map[v.id]}")
    if problems:
        return problems

    def tally(K, top, ors, f):
        plain, signed = Counter(), Counter()
        for t, o in zip(top, ors):
            key = _class_key(K, [f(v) for v in t])
            if len(set(key)) != len(key):
                problems.append(f"simplex {t} is not mapped injectively")
                continue
            order = sorted(range(len(key)), key=key.__getitem__)
            s = frozenset(key)
            plain[s] += 1
            signed[s] += o * perm_parity(order)
        return plain, signed

    bp, bs = tally(base, base.top, base.orientations, lambda v: v)
    cp, cs = tally(base, cover.top, cover.orientations, vertex_map.__getitem__)
    for s in set(bp) | set(cp):
        if cp[s] != d * bp[s]:
            problems.append(f"base simplex class {sorted(s)} has {cp[s]} preimages, expected {d * bp[s]}")
        elif cs[s] != d * bs[s]:
            problems.append(f"orientation not preserved over base simplex class {sorted(s)}")
    return problems


def covering_relation_check(F: EquivariantMap, Fc: EquivariantMap, vertex_map: dict, d: int,
                            cfg: MCConfig, cusp_pairs=None) -> CoveringReport:
    """d * census(K, c; F) = census(K', c'; F') at matching cusp points."""
    K, Kc = F.source, Fc.source
    problems = covering_problems(K, Kc, vertex_map, d)
    if problems:
        return CoveringReport(False, d, problems)
    if cusp_pairs is None:
        cusp_pairs = []
        for cc in Kc.cusp_classes():
            vid = vertex_map[cc.vertex_ids[0]]
            cusp_pairs.append((K.find_face([K.vertex_classes[vid][0]]), cc.id))
    pairs, ok = [], True
    for fb, fc in cusp_pairs:
        eb = census(F, fb, cfg.child(5))
        ec = census(Fc, fc, cfg.child(6))
        diff = abs(d * eb.value - ec.value)
        tol = CERT_SIGMA * float(np.hypot(d * eb.stderr, ec.stderr)) + 1e-9
        good = diff <= tol
        ok &= good
        pairs.append((fb, fc, eb, ec, good))
    return CoveringReport(ok, d, [], pairs)


def moved_classes(K: Complex, end: int | None = None) -> list:
    """Non-cusp vertex classes, optionally only those adjacent to one end."""
    roots = [v for v in vertex_class_roots(K) if not K.vertex(v).is_cusp]
    if end is None:
        return roots
    near = {K.vertex_classes[v][0] for v in K.end_vertices(end)}
    return [v for v in roots if v in near]


__all__ = [
    "CensusEntry", "CoveringReport", "CuspExperiment", "LimitRow", "LimitSeries", "ToricTarget", "build_f0",
    "covering_problems", "covering_relation_check", "cusp_limit_experiment", "delta_threshold",
    "moved_classes", "perturbed_family_member",
]
