"""Bundled complexes with representations and vertex images.

Every builder returns a :class:`Fixture` whose complex validates and whose
map is equivariant by construction.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .complex import Complex, FacePairing, VertexRecord, perm_parity, suspend
from .develop import EquivariantMap, Representation, evaluate_word
from .minkowski import (
    HPoint,
    IdealPoint,
    Isometry,
    apply_isometry,
    exp_map,
    random_unit_coords,
    reflection,
    rotation,
    tangent_frame,
)

PAIRING_RESIDUAL = 1e-12


@dataclass
class Fixture:
    name: str
    complex: Complex
    map: EquivariantMap
    info: dict = field(default_factory=dict)


def _disk_point(r: float, theta: float, m: int = 2) -> HPoint:
    v = np.zeros(m + 1)
    v[0] = math.cosh(r)
    v[1] = math.sinh(r) * math.cos(theta)
    v[2] = math.sinh(r) * math.sin(theta)
    return HPoint(v)


def _ideal(theta: float, m: int = 2) -> IdealPoint:
    v = np.zeros(m + 1)
    v[0] = 1.0
    v[1], v[2] = math.cos(theta), math.sin(theta)
    return IdealPoint(v)


def point_reflection(p: HPoint) -> Isometry:
    """Geodesic symmetry through p (a half-turn in H^2)."""
    x = p.coords
    J = np.diag([-1.0] + [1.0] * (len(x) - 1))
    return Isometry(-np.eye(len(x)) - 2.0 * np.outer(x, J @ x))


def line_reflection(p, q) -> Isometry:
    """Reflection of H^2 in the geodesic through p and q (finite or ideal)."""
    A = np.array([p.coords, q.coords]) @ np.diag([-1.0, 1.0, 1.0])
    n = np.linalg.svd(A)[2][-1]
    return reflection(n)


def _check_residuals(K: Complex, F: EquivariantMap):
    for p in K.pairings:
        g = evaluate_word(F.rep, p.word)
        for k in range(K.dim + 1):
            if k == p.a[1]:
                continue
            a = F.image(K.top[p.a[0]][k]).coords
            b = apply_isometry(g, F.image(K.top[p.b[0]][p.perm[k]])).coords
            err = float(np.abs(a - b).max()) / max(1.0, float(np.abs(a).max()))
            if err > PAIRING_RESIDUAL:
                raise AssertionError(f"pairing residual {err:.3g} exceeds {PAIRING_RESIDUAL}")


# -- closed genus-2 surface ---------------------------------------------------------

def genus2() -> Fixture:
    """Regular octagon with all angles pi/4, sides glued by a b a^-1 b^-1 c d c^-1 d^-1."""
    R = math.acosh((1 + math.sqrt(2)) ** 2)
    P = [_disk_point(R, 2 * math.pi * k / 8) for k in range(8)]
    O = HPoint.origin(2)
    H = point_reflection(HPoint.project(P[0].coords + P[1].coords))

    def A(k):
        return rotation(2, 1, 2, 2 * math.pi * k / 8)

    pairs = [(0, 2), (1, 3), (4, 6), (5, 7)]
    gens = [A(i) @ H @ A(j).inverse() for i, j in pairs]
    verts = [VertexRecord("O")] + [VertexRecord(f"P{k}") for k in range(8)]
    top = [("O", f"P{k}", f"P{(k + 1) % 8}") for k in range(8)]
    pairings = [FacePairing((i, 0), (j, 0), (0, 2, 1), (n + 1,)) for n, (i, j) in enumerate(pairs)]
    K = Complex(2, verts, top, [1] * 8, pairings)
    images = {"O": O, **{f"P{k}": P[k] for k in range(8)}}
    F = EquivariantMap(Representation(gens), images, K)
    _check_residuals(K, F)
    return Fixture("genus2", K, F, {"chi": -2, "volume": 4 * math.pi})


# -- once-punctured torus -----------------------------------------------------------

def punctured_torus(cone_angle: float = 0.0) -> Fixture:
    """Square with opposite sides glued; the corner becomes one cusp point.

    ``cone_angle = 0`` puts the corners at infinity (the complete cusped
    structure); a positive value places them at finite points so that the
    four corner angles add up to ``cone_angle``.
    """
    thetas = [math.pi / 4 + k * math.pi / 2 for k in range(4)]
    if cone_angle == 0:
        V = [_ideal(t) for t in thetas]
    else:
        alpha = cone_angle / 4
        if not 0 < alpha < math.pi / 2:
            raise ValueError("cone angle must lie in (0, 2*pi)")
        R = math.acosh(1 / math.tan(alpha / 2))
        V = [_disk_point(R, t) for t in thetas]
    x_axis = reflection([0.0, 0.0, 1.0])
    y_axis = reflection([0.0, 1.0, 0.0])
    ga = line_reflection(V[0], V[1]) @ x_axis
    gb = line_reflection(V[1], V[2]) @ y_axis
    ids = [f"V{k}" for k in range(4)]
    verts = [VertexRecord(v, "cusp", 0) for v in ids]
    top = [("V0", "V1", "V2"), ("V0", "V2", "V3")]
    pairings = [
        FacePairing((0, 2), (1, 0), (2, 1, 0), (1,)),
        FacePairing((0, 0), (1, 1), (1, 0, 2), (2,)),
    ]
    K = Complex(2, verts, top, [1, 1], pairings, ends=1)
    F = EquivariantMap(Representation([ga, gb]), dict(zip(ids, V)), K)
    _check_residuals(K, F)
    area = 2 * math.pi - cone_angle
    return Fixture("punctured_torus", K, F, {"volume": area, "cusp_census": cone_angle / (2 * math.pi)})


# -- 2-sphere whose vertex star winds twice ---------------------------------------------

def cycle(n: int, prefix: str = "u") -> Complex:
    verts = [VertexRecord(f"{prefix}{k}") for k in range(n)]
    top = [(f"{prefix}{k}", f"{prefix}{(k + 1) % n}") for k in range(n)]
    return Complex(1, verts, top)


def winding_sphere(turns: int = 2, n: int = 6) -> Fixture:
    """Suspension of an n-cycle; the north pole's star wraps ``turns`` times around its image."""
    K = suspend(cycle(n), ends=None)
    images = {"n": HPoint.origin(2), "s": _disk_point(2.3, 0.7 + math.pi / n)}
    for k in range(n):
        images[f"u{k}"] = _disk_point(0.5, 2 * math.pi * turns * k / n)
    F = EquivariantMap(Representation([], m=2), images, K)
    return Fixture("winding_sphere", K, F, {"pole": "n", "census": turns})


# -- 4-sphere around a vertex --------------------------------------------------------

def cross_polytope_boundary() -> Complex:
    verts = [VertexRecord(f"e{i}{s}") for i in range(1, 5) for s in "+-"]
    top, ors = [], []
    for signs in itertools.product("+-", repeat=4):
        top.append(tuple(f"e{i + 1}{s}" for i, s in enumerate(signs)))
        ors.append(math.prod(1 if s == "+" else -1 for s in signs))
    return Complex(3, verts, top, ors)


def star4d(seed: int = 0) -> Fixture:
    """Suspension of the 16-cell boundary; the north pole sits at the origin."""
    rng = np.random.default_rng(seed)
    K = suspend(cross_polytope_boundary(), ends=None)
    O = HPoint.origin(4)
    images = {"n": O}
    for i in range(1, 5):
        for s in "+-":
            d = np.zeros(4)
            d[i - 1] = 1.0 if s == "+" else -1.0
            d += 0.15 * rng.standard_normal(4)
            d /= np.linalg.norm(d)
            images[f"e{i}{s}"] = exp_map(O, 0.8 * (tangent_frame(O) @ d))
    u = random_unit_coords(rng, 1, 4)[0]
    images["s"] = exp_map(O, 2.5 * (tangent_frame(O) @ u))
    F = EquivariantMap(Representation([], m=4), images, K)
    return Fixture("star4d", K, F, {"pole": "n", "census": 1})


# -- flat 3-torus cross-sections and 4-D cone ends ----------------------------------------

def _tvid(p) -> str:
    return "t" + "".join(str(c) for c in p)


def torus3(shape=(2, 2, 2)) -> Complex:
    """Freudenthal triangulation of the n1 x n2 x n3 cube with opposite faces glued.

    Vertex ids cover the closed box so every tetrahedron sits in one
    fundamental domain; faces on the upper boundary are paired with the
    lower ones by the words g1, g2, g3.
    """
    shape = tuple(shape)
    pts = list(itertools.product(*(range(n + 1) for n in shape)))
    verts = [VertexRecord(_tvid(p)) for p in pts]
    top, ors = [], []
    for p in itertools.product(*(range(n) for n in shape)):
        for pi in itertools.permutations(range(3)):
            q = list(p)
            tet = [tuple(q)]
            for a in pi:
                q[a] += 1
                tet.append(tuple(q))
            top.append(tuple(_tvid(v) for v in tet))
            ors.append(perm_parity(pi))
    where = {}
    coords = {}
    for s, t in enumerate(top):
        for i in range(4):
            where[frozenset(t[:i] + t[i + 1:])] = (s, i)
    for p in pts:
        coords[_tvid(p)] = p
    pairings = []
    for s, t in enumerate(top):
        for i in range(4):
            facet = t[:i] + t[i + 1:]
            for a in range(3):
                if all(coords[v][a] == shape[a] for v in facet):
                    def shift(v):
                        c = list(coords[v])
                        c[a] -= shape[a]
                        return _tvid(c)
                    s2, i2 = where[frozenset(shift(v) for v in facet)]
                    t2 = top[s2]
                    perm = tuple(i2 if k == i else t2.index(shift(t[k])) for k in range(4))
                    pairings.append(FacePairing((s, i), (s2, i2), perm, (a + 1,)))
    return Complex(3, verts, top, ors, pairings)


TORUS_ANGLES = (2 * math.pi / 5, 2 * math.pi / 7, 0.9)


def torus_rep(shape=(2, 2, 2), base_shape=(2, 2, 2)) -> Representation:
    """Rotations in the (x3, x4) plane; they fix the plane x3 = x4 = 0 pointwise."""
    gens = []
    for a in range(3):
        power = shape[a] // base_shape[a]
        gens.append(rotation(4, 3, 4, power * TORUS_ANGLES[a]))
    return Representation(gens)


def torus_base_images(radius: float = 1.5, base_shape=(2, 2, 2), arc: float = 1.5, start: float = 0.3) -> dict:
    """f0 on the base classes: distinct points of a circle in the plane x3 = x4 = 0.

    The points sit on an arc of the given angular length, as seen from the
    origin.  With ``arc < pi`` the origin is a corner of every flattened
    cone simplex; ``arc = 2*pi*(1 - 1/8)`` spreads them around the circle.
    """
    out = {}
    cells = list(itertools.product(*(range(n) for n in base_shape)))
    for idx, p in enumerate(cells):
        theta = start + arc * idx / (len(cells) - 1)
        v = np.zeros(5)
        v[0] = math.cosh(radius)
        v[1] = math.sinh(radius) * math.cos(theta)
        v[2] = math.sinh(radius) * math.sin(theta)
        out[p] = HPoint(v)
    return out


def lift_torus_images(base_images: dict, shape=(2, 2, 2), base_shape=(2, 2, 2)) -> dict:
    """Images of every box vertex id from images of the base cells.

    A vertex p of the box is g1^a g2^b g3^c applied to the base cell
    p mod base_shape, where (a, b, c) = p // base_shape.
    """
    base_rep = torus_rep(base_shape, base_shape)
    out = {}
    for p in itertools.product(*(range(n + 1) for n in shape)):
        q = tuple(c % n for c, n in zip(p, base_shape))
        word = []
        for a in range(3):
            word += [a + 1] * (p[a] // base_shape[a])
        out[_tvid(p)] = apply_isometry(evaluate_word(base_rep, word), base_images[q])
    return out


def cone4d(shape=(2, 2, 2), radius: float = 1.5, arc: float = 1.5, base_images: dict | None = None) -> Fixture:
    """Two cusp points coned over a flat 3-torus, with the degenerate map f0.

    End 0 has its apex at the origin of the invariant plane, end 1 at an
    ideal point of that plane.
    """
    base_shape = (2, 2, 2)
    K = suspend(torus3(shape), ends=(0, 1))
    rep = torus_rep(shape, base_shape)
    if base_images is None:
        base_images = torus_base_images(radius, base_shape, arc)
    images = lift_torus_images(base_images, shape, base_shape)
    images["c0"] = HPoint.origin(4)
    images["c1"] = IdealPoint([1.0, 1.0, 0.0, 0.0, 0.0])
    F = EquivariantMap(rep, images, K)
    _check_residuals(K, F)
    plane = (HPoint.origin(4), np.eye(5)[1], np.eye(5)[2])
    return Fixture("cone4d", K, F, {"plane": plane, "shape": shape})


def torus_cover_map(shape=(4, 2, 2), base_shape=(2, 2, 2)) -> dict:
    """Vertex id map of the cover's box onto the base box."""
    vm = {"c0": "c0", "c1": "c1"}
    for p in itertools.product(*(range(n + 1) for n in shape)):
        vm[_tvid(p)] = _tvid(tuple(c % n for c, n in zip(p, base_shape)))
    return vm


# -- 2-D cone over a circle and its double cover -----------------------------------------

def circle_with_word(n: int) -> Complex:
    """n edges u0..u_n where u_n is the image of u0 under generator 1."""
    verts = [VertexRecord(f"u{k}") for k in range(n + 1)]
    top = [(f"u{k}", f"u{k + 1}") for k in range(n)]
    return Complex(1, verts, top, [1] * n, [FacePairing((n - 1, 0), (0, 1), (1, 0), (1,))])


def cone2d(n: int = 3, phi: float = 2.0, power: int = 1, radius: float = 0.5) -> Fixture:
    """Suspension of a circle; generator 1 rotates by power*phi about the apex image."""
    K = suspend(circle_with_word(n), ends=(0, 1))
    g = rotation(2, 1, 2, power * phi)
    images = {"c0": HPoint.origin(2), "c1": HPoint.origin(2)}
    for k in range(n + 1):
        images[f"u{k}"] = _disk_point(radius, power * phi * k / n)
    F = EquivariantMap(Representation([g]), images, K)
    _check_residuals(K, F)
    return Fixture(f"cone2d_{n}", K, F, {"cusp_census": power * phi / (2 * math.pi)})


def cover_pair_2d(phi: float = 2.0):
    """(base, cover, vertex map, degree) for the double cover of the circle end."""
    base = cone2d(3, phi, 1)
    cover = cone2d(6, phi, 2)
    vm = {"c0": "c0", "c1": "c1"}
    for k in range(7):
        vm[f"u{k}"] = f"u{k % 3}"
    return base, cover, vm, 2


CIRCLE_ARC = 2 * math.pi * 7 / 8


def cover_pair_4d(radius: float | None = None, seed: int = 0, arc: float = CIRCLE_ARC):
    """(base, cover, vertex map, degree) for the 4x2x2 torus end over the 2x2x2 one.

    The base map is f0 moved by a seeded perturbation (default radius: the
    stability threshold of f0) and the cover carries its lift.  By default
    the cross-section images surround the apex image, which gives the cusp
    point a nonzero census.
    """
    from .cusp import delta_threshold
    from .develop import perturb

    base = cone4d(arc=arc)
    r = delta_threshold(base.map) if radius is None else radius
    F = perturb(base.map, r, seed)
    base = Fixture("cone4d_perturbed", base.complex, F, dict(base.info, radius=r, seed=seed))
    cells = {p: F.image(_tvid(p)) for p in itertools.product(range(2), repeat=3)}
    cover = cone4d((4, 2, 2), base_images=cells)
    cover.name = "cone4d_cover"
    return base, cover, torus_cover_map((4, 2, 2)), 2


FIXTURES = {
    "genus2": genus2,
    "punctured_torus": punctured_torus,
    "winding_sphere": winding_sphere,
    "star4d": star4d,
    "cone4d": cone4d,
    "cone2d": cone2d,
}
