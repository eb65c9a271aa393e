"""Abstract triangulations of closed and end-compactified manifolds.

A :class:`Complex` is a finite list of ordered top simplices over vertex
ids.  Vertex ids name vertices of one lift of the simplices to H^m (a
fundamental domain), so two facet slots carrying the same vertex ids are
glued directly.  The remaining facets are glued by :class:`FacePairing`
records carrying the group word of the deck transformation involved.

Group words are tuples of nonzero ints: ``+k`` is generator k (1-based)
and ``-k`` its inverse.  A pairing from slot ``a`` to slot ``b`` with
word ``w`` asserts that local vertex ``k`` of simplex ``a`` is the image
under ``w`` of local vertex ``perm[k]`` of simplex ``b``.
"""

from __future__ import annotations

import itertools
from collections import defaultdict, deque
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np


class InvalidComplexError(ValueError):
    pass


class NonManifoldError(ValueError):
    pass


# -- words ---------------------------------------------------------------------

def reduce_word(word) -> tuple:
    out: list[int] = []
    for g in word:
        if g == 0:
            raise ValueError("generator index 0 is not allowed (indices are 1-based)")
        if out and out[-1] == -g:
            out.pop()
        else:
            out.append(int(g))
    return tuple(out)


def invert_word(word) -> tuple:
    return tuple(-g for g in reversed(word))


def perm_parity(seq) -> int:
    """Sign of the permutation sorting `seq` (distinct items)."""
    seq = list(seq)
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


# -- records -------------------------------------------------------------------

@dataclass(frozen=True)
class VertexRecord:
    id: str
    kind: str = "interior"
    end: int | None = None

    @property
    def is_cusp(self) -> bool:
        return self.kind == "cusp"


@dataclass(frozen=True)
class FacePairing:
    a: tuple  # (simplex index, opposite local vertex)
    b: tuple
    perm: tuple  # local vertex k of a  <->  local vertex perm[k] of b
    word: tuple = ()


@dataclass(frozen=True)
class Incidence:
    """One top simplex containing a face, as seen from a lift of the face.

    ``subset`` holds the local indices realising the face inside
    ``simplex``; ``tau_order[j]`` is the local index matching vertex j of
    the root incidence; ``word`` moves the fundamental-domain copy of the
    simplex to its position around the lifted face.
    """

    simplex: int
    subset: tuple
    word: tuple
    tau_order: tuple


@dataclass(frozen=True)
class FaceClass:
    id: int
    dim: int
    members: tuple  # sorted ((simplex, subset), ...)
    vertex_ids: tuple  # ids of the first member
    cusp_end: int | None = None

    @property
    def is_cusp(self) -> bool:
        return self.cusp_end is not None

    @property
    def label(self) -> str:
        return "[" + ",".join(self.vertex_ids) + "]"


@dataclass
class ValidationReport:
    violations: list = field(default_factory=list)
    boundary: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok


@dataclass
class StarTraversal:
    incidences: list
    closures: list  # (incidence index, alternative word, alternative tau_order)
    adjacency: list  # (incidence index, opposite local, neighbour index, perm)


@dataclass
class LinkReport:
    face: int
    dim: int
    complex: "Complex | None"
    is_sphere: bool
    reasons: list
    euler: int | None = None
    betti: tuple | None = None
    boundary_zero: bool | None = None


class Complex:
    def __init__(self, dim: int, vertices, top, orientations=None, pairings=(), ends: int | None = None):
        self.dim = int(dim)
        self.vertices = tuple(v if isinstance(v, VertexRecord) else VertexRecord(**v) for v in vertices)
        self.top = tuple(tuple(str(x) for x in t) for t in top)
        if orientations is None:
            orientations = [1] * len(self.top)
        self.orientations = tuple(int(o) for o in orientations)
        self.pairings = tuple(
            FacePairing(tuple(p.a), tuple(p.b), tuple(p.perm), reduce_word(p.word)) for p in pairings
        )
        if ends is None:
            ends = 1 + max((v.end for v in self.vertices if v.is_cusp), default=-1)
        self.ends = int(ends)
        self._vid = {v.id: v for v in self.vertices}

    def __repr__(self):
        return f"Complex(dim={self.dim}, top={len(self.top)}, pairings={len(self.pairings)}, ends={self.ends})"

    def vertex(self, vid: str) -> VertexRecord:
        return self._vid[vid]

    # -- gluing ----------------------------------------------------------------

    @cached_property
    def _gluing(self):
        glue: dict = {}
        problems: list = []
        open_slots: list = []
        m = self.dim
        paired = set()
        for n, p in enumerate(self.pairings):
            for slot in (p.a, p.b):
                s, i = slot
                if not (0 <= s < len(self.top) and 0 <= i <= m):
                    problems.append(f"pairing {n}: slot {slot} out of range")
                elif slot in paired:
                    problems.append(f"pairing {n}: slot {slot} used twice")
                paired.add(slot)
            if sorted(p.perm) != list(range(m + 1)) or p.perm[p.a[1]] != p.b[1]:
                problems.append(f"pairing {n}: map {p.perm} is not a facet bijection")
                continue
            if p.a == p.b:
                problems.append(f"pairing {n}: slot glued to itself")
                continue
            inv = [0] * (m + 1)
            for k, q in enumerate(p.perm):
                inv[q] = k
            glue[p.a] = (p.b[0], p.b[1], tuple(p.perm), p.word)
            glue[p.b] = (p.a[0], p.a[1], tuple(inv), invert_word(p.word))
        groups = defaultdict(list)
        for s, t in enumerate(self.top):
            for i in range(m + 1):
                if (s, i) not in paired:
                    groups[frozenset(t[:i] + t[i + 1:])].append((s, i))
        for key, slots in groups.items():
            if len(slots) == 1:
                open_slots.append(slots[0])
            elif len(slots) > 2:
                problems.append(f"facet {sorted(key)} shared by {len(slots)} slots")
            else:
                (s, i), (s2, i2) = slots
                t, t2 = self.top[s], self.top[s2]
                perm = tuple(i2 if k == i else t2.index(t[k]) for k in range(m + 1))
                inv = tuple(i if k == i2 else t.index(t2[k]) for k in range(m + 1))
                glue[(s, i)] = (s2, i2, perm, ())
                glue[(s2, i2)] = (s, i, inv, ())
        return glue, problems, sorted(open_slots)

    def neighbour(self, s: int, i: int):
        """(simplex, opposite local, perm, word) across facet slot (s, i), or None."""
        return self._gluing[0].get((s, i))

    # -- vertex classes ----------------------------------------------------------

    @cached_property
    def _vertex_uf(self):
        parent = {v.id: v.id for v in self.vertices}
        word = {v.id: () for v in self.vertices}
        relations = []

        def find(v):
            if parent[v] == v:
                return v, ()
            r, w = find(parent[v])
            word[v] = reduce_word(word[v] + w)
            parent[v] = r
            return r, word[v]

        m = self.dim
        for p in self.pairings:
            (sa, ia), (sb, _) = p.a, p.b
            if sa >= len(self.top) or sb >= len(self.top) or sorted(p.perm) != list(range(m + 1)):
                continue
            for k in range(m + 1):
                if k == ia:
                    continue
                a, b = self.top[sa][k], self.top[sb][p.perm[k]]
                if a not in parent or b not in parent:
                    continue
                ra, Wa = find(a)
                rb, Wb = find(b)
                w = reduce_word(invert_word(Wa) + p.word + Wb)
                if ra == rb:
                    if w:
                        relations.append(w)
                else:
                    parent[ra] = rb
                    word[ra] = w
        order = {v.id: n for n, v in enumerate(self.vertices)}
        classes = defaultdict(list)
        for v in self.vertices:
            classes[find(v.id)[0]].append(v.id)
        result = {}
        for root, members in classes.items():
            canon = min(members, key=order.__getitem__)
            Wc = find(canon)[1]
            for v in members:
                result[v] = (canon, reduce_word(find(v)[1] + invert_word(Wc)))
        return result, relations

    @property
    def vertex_classes(self) -> dict:
        """vid -> (canonical vid, word) with f(vid) = rho(word) f(canonical)."""
        return self._vertex_uf[0]

    @property
    def relations(self) -> list:
        """Cycle words found while identifying vertices (should act trivially)."""
        return self._vertex_uf[1]

    # -- face classes ------------------------------------------------------------

    @cached_property
    def _faces(self):
        m = self.dim
        items = [
            (s, S)
            for s in range(len(self.top))
            for d in range(1, m + 2)
            for S in itertools.combinations(range(m + 1), d)
        ]
        parent = {it: it for it in items}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        def union(x, y):
            rx, ry = find(x), find(y)
            if rx != ry:
                if ry < rx:
                    rx, ry = ry, rx
                parent[ry] = rx

        glue = self._gluing[0]
        for (s, i), (s2, _i2, perm, _w) in glue.items():
            rest = [k for k in range(m + 1) if k != i]
            for d in range(1, m + 1):
                for S in itertools.combinations(rest, d):
                    union((s, S), (s2, tuple(sorted(perm[k] for k in S))))
        by_ids = {}
        for s, S in items:
            key = frozenset(self.top[s][k] for k in S)
            if key in by_ids:
                union(by_ids[key], (s, S))
            else:
                by_ids[key] = (s, S)
        groups = defaultdict(list)
        for it in items:
            groups[find(it)].append(it)
        ordered = sorted((sorted(g) for g in groups.values()), key=lambda g: (len(g[0][1]), g[0]))
        classes = []
        index = {}
        for cid, g in enumerate(ordered):
            s, S = g[0]
            vids = tuple(self.top[s][k] for k in S)
            end = None
            if len(S) == 1 and self._vid.get(vids[0]) is not None and self._vid[vids[0]].is_cusp:
                end = self._vid[vids[0]].end
            classes.append(FaceClass(cid, len(S) - 1, tuple(g), vids, end))
            for it in g:
                index[it] = cid
        return classes, index

    @property
    def face_classes(self) -> list:
        return self._faces[0]

    def face_class_of(self, s: int, subset) -> int:
        return self._faces[1][(s, tuple(sorted(subset)))]

    def find_face(self, vertex_ids) -> int:
        """Face class of the first top simplex face with these vertex ids."""
        want = set(vertex_ids)
        for s, t in enumerate(self.top):
            if want <= set(t):
                return self.face_class_of(s, [t.index(v) for v in want])
        raise KeyError(f"no face with vertices {sorted(want)}")

    def cusp_classes(self) -> list:
        return [c for c in self.face_classes if c.is_cusp]

    def end_vertices(self, end: int) -> set:
        """Non-cusp vertex ids of simplices incident to a cusp of the given end."""
        cusps = {v.id for v in self.vertices if v.is_cusp and v.end == end}
        out = set()
        for t in self.top:
            if cusps & set(t):
                out |= {v for v in t if v not in cusps}
        return out


# -- operations ----------------------------------------------------------------

def validate(K: Complex, closed: bool = True) -> ValidationReport:
    rep = ValidationReport()
    m = K.dim
    if m < 0:
        rep.violations.append("negative dimension")
        return rep
    ids = [v.id for v in K.vertices]
    if len(set(ids)) != len(ids):
        rep.violations.append("duplicate vertex ids")
    for v in K.vertices:
        if v.kind not in ("interior", "cusp"):
            rep.violations.append(f"vertex {v.id}: unknown kind {v.kind!r}")
        if v.is_cusp and (v.end is None or not 0 <= v.end < K.ends):
            rep.violations.append(f"vertex {v.id}: end index {v.end} outside 0..{K.ends - 1}")
    if len(K.orientations) != len(K.top):
        rep.violations.append("orientation list length differs from simplex count")
    for s, t in enumerate(K.top):
        if len(t) != m + 1:
            rep.violations.append(f"simplex {s}: expected {m + 1} vertices, got {len(t)}")
        if len(set(t)) != len(t):
            rep.violations.append(f"simplex {s}: repeated vertex id")
        for v in t:
            if v not in K._vid:
                rep.violations.append(f"simplex {s}: unknown vertex {v!r}")
    for s, o in enumerate(K.orientations):
        if o not in (1, -1):
            rep.violations.append(f"simplex {s}: orientation must be +1 or -1")
    if rep.violations:
        return rep
    glue, problems, open_slots = K._gluing
    rep.violations.extend(problems)
    rep.boundary = open_slots
    if closed:
        for s, i in open_slots:
            rep.violations.append(f"open facet: slot ({s}, {i}) {list(K.top[s][:i] + K.top[s][i + 1:])}")
    for (s, i), (s2, i2, perm, _w) in glue.items():
        if (s, i) > (s2, i2):
            continue
        order = [perm[k] for k in range(m + 1) if k != i]
        lhs = K.orientations[s] * (-1) ** i * perm_parity(order)
        rhs = -K.orientations[s2] * (-1) ** i2
        if lhs != rhs:
            rep.violations.append(f"incoherent orientation across slots ({s}, {i}) / ({s2}, {i2})")
    for vid, (canon, _w) in K.vertex_classes.items():
        a, b = K.vertex(vid), K.vertex(canon)
        if a.kind != b.kind or a.end != b.end:
            rep.violations.append(f"vertices {vid} and {canon} are identified but differ in kind/end")
    return rep


def euler_characteristic(K: Complex, closed: bool = True) -> int:
    rep = validate(K, closed=closed)
    if not rep.ok:
        raise InvalidComplexError("; ".join(rep.violations[:5]))
    return int(sum((-1) ** c.dim for c in K.face_classes))


def traverse_star(K: Complex, face: int, allow_cusp: bool = False) -> StarTraversal:
    cls = K.face_classes[face]
    if cls.is_cusp and not allow_cusp:
        raise ValueError(f"face {face} is a cusp point")
    m = K.dim
    s0, S0 = cls.members[0]
    root = Incidence(s0, S0, (), S0)
    incs = [root]
    seen = {(s0, S0): 0}
    closures, adjacency = [], []
    queue = deque([0])
    while queue:
        n = queue.popleft()
        inc = incs[n]
        for i in range(m + 1):
            if i in inc.subset:
                continue
            nb = K.neighbour(inc.simplex, i)
            if nb is None:
                raise NonManifoldError(f"star of face {face} meets the open facet ({inc.simplex}, {i})")
            s2, _i2, perm, w = nb
            S2 = tuple(sorted(perm[k] for k in inc.subset))
            order2 = tuple(perm[k] for k in inc.tau_order)
            word2 = reduce_word(inc.word + w)
            key = (s2, S2)
            if key in seen:
                j = seen[key]
                if word2 != incs[j].word or order2 != incs[j].tau_order:
                    closures.append((j, word2, order2))
            else:
                j = seen[key] = len(incs)
                incs.append(Incidence(s2, S2, word2, order2))
                queue.append(j)
            adjacency.append((n, i, j, perm))
    if set(seen) != set(cls.members):
        raise NonManifoldError(f"star of face {face} is not connected through facets")
    if not cls.is_cusp:
        for j, _w, order in closures:
            if order != incs[j].tau_order:
                raise NonManifoldError(f"star of face {face} closes up with a twist")
    return StarTraversal(incs, closures, adjacency)


def star_incidences(K: Complex, face: int, allow_cusp: bool = False) -> list:
    return traverse_star(K, face, allow_cusp=allow_cusp).incidences


def _simplicial_faces(top):
    faces = defaultdict(set)
    for t in top:
        for d in range(1, len(t) + 1):
            for c in itertools.combinations(sorted(t), d):
                faces[d - 1].add(c)
    return {d: sorted(f) for d, f in faces.items()}


def rational_betti(top) -> tuple:
    """Betti numbers over Q of the simplicial complex generated by `top`."""
    faces = _simplicial_faces(top)
    dmax = max(faces)
    index = {d: {f: n for n, f in enumerate(faces[d])} for d in faces}
    ranks = {0: 0, dmax + 1: 0}
    for d in range(1, dmax + 1):
        B = np.zeros((len(faces[d - 1]), len(faces[d])))
        for col, f in enumerate(faces[d]):
            for k in range(len(f)):
                B[index[d - 1][f[:k] + f[k + 1:]], col] = (-1) ** k
        ranks[d] = int(np.linalg.matrix_rank(B)) if B.size else 0
    return tuple(len(faces[d]) - ranks[d] - ranks[d + 1] for d in range(dmax + 1))


def boundary_chain(top, orientations) -> dict:
    """Boundary of the oriented chain sum o_i [t_i], with faces as sorted tuples."""
    chain = defaultdict(int)
    for t, o in zip(top, orientations):
        sign = o * perm_parity(t)
        t = sorted(t)
        for k in range(len(t)):
            chain[tuple(t[:k] + t[k + 1:])] += sign * (-1) ** k
    return {f: c for f, c in chain.items() if c}


def link_sphere(K: Complex, face: int, allow_cusp: bool = False) -> LinkReport:
    """Link of a face, assembled from its star, with a homology-sphere check."""
    trav = traverse_star(K, face, allow_cusp=allow_cusp)
    m = K.dim
    incs = trav.incidences
    parent = {}

    def find(x):
        parent.setdefault(x, x)
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for n, inc in enumerate(incs):
        for k in range(m + 1):
            if k not in inc.subset:
                find((n, k))
    for n, i, j, perm in trav.adjacency:
        for k in range(m + 1):
            if k != i and k not in incs[n].subset:
                a, b = find((n, k)), find((j, perm[k]))
                if a != b:
                    parent[max(a, b)] = min(a, b)
    labels = {}
    top, ors = [], []
    for n, inc in enumerate(incs):
        comp = [k for k in range(m + 1) if k not in inc.subset]
        names = []
        for k in comp:
            r = find((n, k))
            labels.setdefault(r, f"L{len(labels)}")
            names.append(labels[r])
        top.append(tuple(names))
        ors.append(K.orientations[inc.simplex] * perm_parity(list(inc.tau_order) + comp))
    dim = m - len(incs[0].subset)
    reasons = []
    if dim < 0:
        # the link of a top simplex is empty, the (-1)-sphere
        return LinkReport(face, -1, None, True, [], euler=0, boundary_zero=True)
    if dim == 0:
        ok = len(top) == 2 and ors[0] == -ors[1] and top[0] != top[1]
        if not ok:
            reasons.append("0-dimensional link is not two oppositely oriented points")
        L = Complex(0, [VertexRecord(labels[r]) for r in labels], top, ors)
        return LinkReport(face, 0, L, ok, reasons, euler=len(top), betti=None, boundary_zero=ok)
    if any(len(set(t)) != len(t) for t in top) or len({frozenset(t) for t in top}) != len(top):
        return LinkReport(face, dim, None, False, ["link is not simplicial"])
    L = Complex(dim, [VertexRecord(v) for v in labels.values()], top, ors)
    rep = validate(L)
    reasons.extend(rep.violations)
    bd = boundary_chain(top, ors)
    if bd:
        reasons.append("link orientation is not a cycle")
    betti = rational_betti(top)
    sphere_betti = tuple([1] + [0] * (dim - 1) + [1])
    if betti != sphere_betti:
        reasons.append(f"Betti numbers {betti} differ from those of S^{dim}")
    euler = sum((-1) ** d * b for d, b in enumerate(betti))
    return LinkReport(face, dim, L, not reasons, reasons, euler=euler, betti=betti, boundary_zero=not bd)


def build_cone_complex(cross: Complex, end_index: int, cusp_id: str | None = None) -> Complex:
    """Cone over a cross-section with a single cusp apex (local vertex 0)."""
    rep = validate(cross)
    if not rep.ok:
        raise InvalidComplexError("cross-section: " + "; ".join(rep.violations[:5]))
    c = cusp_id or f"c{end_index}"
    verts = list(cross.vertices) + [VertexRecord(c, "cusp", end_index)]
    top = [(c,) + t for t in cross.top]
    pairings = [_shift_pairing(p, 0) for p in cross.pairings]
    return Complex(cross.dim + 1, verts, top, cross.orientations, pairings, ends=max(cross.ends, end_index + 1))


def _shift_pairing(p: FacePairing, offset: int) -> FacePairing:
    return FacePairing(
        (p.a[0] + offset, p.a[1] + 1),
        (p.b[0] + offset, p.b[1] + 1),
        (0,) + tuple(q + 1 for q in p.perm),
        p.word,
    )


def suspend(cross: Complex, ends=(0, 1), cusp_ids=None) -> Complex:
    """Two cones over the same cross-section glued along it.

    The result is a closed pseudo-manifold whose two apexes are cusp
    points of the given ends (pass ``ends=None`` for interior apexes).
    """
    rep = validate(cross)
    if not rep.ok:
        raise InvalidComplexError("cross-section: " + "; ".join(rep.violations[:5]))
    ids = cusp_ids or (("c0", "c1") if ends is not None else ("n", "s"))
    if ends is None:
        apex = [VertexRecord(ids[0]), VertexRecord(ids[1])]
        nends = cross.ends
    else:
        apex = [VertexRecord(ids[0], "cusp", ends[0]), VertexRecord(ids[1], "cusp", ends[1])]
        nends = max(cross.ends, max(ends) + 1)
    n = len(cross.top)
    top = [(ids[0],) + t for t in cross.top] + [(ids[1],) + t for t in cross.top]
    ors = list(cross.orientations) + [-o for o in cross.orientations]
    pairings = [_shift_pairing(p, 0) for p in cross.pairings] + [_shift_pairing(p, n) for p in cross.pairings]
    return Complex(cross.dim + 1, list(cross.vertices) + apex, top, ors, pairings, ends=nends)


# -- JSON ------------------------------------------------------------------------

def complex_to_json(K: Complex) -> dict:
    verts = []
    for v in K.vertices:
        d = {"id": v.id, "kind": v.kind}
        if v.end is not None:
            d["end"] = v.end
        verts.append(d)
    return {
        "dim": K.dim,
        "ends": K.ends,
        "vertices": verts,
        "top": [{"verts": list(t), "or": o} for t, o in zip(K.top, K.orientations)],
        "pairings": [
            {
                "a": {"simplex": p.a[0], "facet": p.a[1]},
                "b": {"simplex": p.b[0], "facet": p.b[1]},
                "map": list(p.perm),
                "word": list(p.word),
            }
            for p in K.pairings
        ],
    }


def complex_from_json(d: dict) -> Complex:
    verts = [VertexRecord(str(v["id"]), v.get("kind", "interior"), v.get("end")) for v in d["vertices"]]
    pairings = [
        FacePairing(
            (int(p["a"]["simplex"]), int(p["a"]["facet"])),
            (int(p["b"]["simplex"]), int(p["b"]["facet"])),
            tuple(int(q) for q in p["map"]),
            tuple(int(g) for g in p.get("word", [])),
        )
        for p in d.get("pairings", [])
    ]
    return Complex(
        int(d["dim"]),
        verts,
        [t["verts"] for t in d["top"]],
        [int(t.get("or", 1)) for t in d["top"]],
        pairings,
        ends=d.get("ends"),
    )
