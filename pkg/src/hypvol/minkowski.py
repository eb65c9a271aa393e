"""Hyperboloid model of H^m inside Minkowski space R^{m,1}.

Coordinates are ordered time first and the bilinear form is
<u, v> = -u_0 v_0 + sum_{i>=1} u_i v_i.  Finite points live on the
future sheet <v, v> = -1, ideal points are future light-cone rays
normalised to v_0 = 1.
"""

from __future__ import annotations

import numpy as np

POINT_TOL = 1e-10
ISOMETRY_TOL = 1e-9
IDENTITY_TOL = 1e-8
SUPPORTED_DIMS = (2, 3, 4)


class DegenerateDirectionError(ValueError):
    pass


def metric(m: int) -> np.ndarray:
    J = np.eye(m + 1)
    J[0, 0] = -1.0
    return J


def _as_vec(u) -> np.ndarray:
    if isinstance(u, (HPoint, IdealPoint)):
        return u.coords
    if isinstance(u, TangentVector):
        return u.v
    return np.asarray(u, dtype=float)


def lorentz_dot(u, v) -> float:
    u, v = _as_vec(u), _as_vec(v)
    if u.shape[-1] != v.shape[-1]:
        raise ValueError(f"dimension mismatch: {u.shape[-1]} vs {v.shape[-1]}")
    return float(-u[0] * v[0] + u[1:] @ v[1:])


def lorentz_dots(U: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Row-wise form values <U[i], v>."""
    return -U[..., 0] * v[0] + U[..., 1:] @ v[1:]


def _frozen(v: np.ndarray) -> np.ndarray:
    v = np.array(v, dtype=float)
    v.setflags(write=False)
    return v


class HPoint:
    """A point of H^m on the future sheet."""

    __slots__ = ("coords",)
    kind = "finite"

    def __init__(self, coords, check: bool = True):
        v = np.asarray(coords, dtype=float)
        if v.ndim != 1 or len(v) - 1 not in SUPPORTED_DIMS:
            raise ValueError(f"expected m+1 coordinates with m in {SUPPORTED_DIMS}, got shape {v.shape}")
        if check:
            q = lorentz_dot(v, v)
            if abs(q + 1.0) > POINT_TOL * max(1.0, v[0] ** 2) or v[0] <= 0:
                raise ValueError(f"not on the future sheet: <v,v>={q!r}, v0={v[0]!r}")
        self.coords = _frozen(v)

    @classmethod
    def project(cls, v) -> "HPoint":
        """Rescale a future timelike vector onto the sheet."""
        v = np.asarray(v, dtype=float)
        q = lorentz_dot(v, v)
        if q >= 0 or v[0] <= 0:
            raise ValueError("vector is not future timelike")
        return cls(v / np.sqrt(-q), check=False)

    @classmethod
    def origin(cls, m: int) -> "HPoint":
        v = np.zeros(m + 1)
        v[0] = 1.0
        return cls(v)

    @property
    def dim(self) -> int:
        return len(self.coords) - 1

    def __repr__(self):
        return f"HPoint({np.array2string(self.coords, precision=6)})"


class IdealPoint:
    """A point of the ideal boundary, stored with v_0 = 1."""

    __slots__ = ("coords",)
    kind = "ideal"

    def __init__(self, coords, check: bool = True):
        v = np.asarray(coords, dtype=float)
        if v.ndim != 1 or len(v) - 1 not in SUPPORTED_DIMS:
            raise ValueError(f"expected m+1 coordinates with m in {SUPPORTED_DIMS}, got shape {v.shape}")
        if v[0] <= 0:
            raise ValueError("ideal point representative must be future pointing")
        if check and abs(lorentz_dot(v, v)) > POINT_TOL * float(v @ v):
            raise ValueError("representative is not lightlike")
        v = v / v[0]
        if not check:
            # snap the spatial part onto the unit sphere
            v[1:] /= np.linalg.norm(v[1:])
        self.coords = _frozen(v)

    @classmethod
    def project(cls, v) -> "IdealPoint":
        return cls(v, check=False)

    @property
    def dim(self) -> int:
        return len(self.coords) - 1

    def __repr__(self):
        return f"IdealPoint({np.array2string(self.coords, precision=6)})"


class TangentVector:
    __slots__ = ("base", "v")

    def __init__(self, base: HPoint, v, check: bool = True):
        v = np.asarray(v, dtype=float)
        if check and abs(lorentz_dot(base.coords, v)) > POINT_TOL * max(1.0, float(np.abs(v).max())):
            raise ValueError("vector is not tangent at the base point")
        self.base = base
        self.v = _frozen(v)

    def norm(self) -> float:
        return float(np.sqrt(max(lorentz_dot(self.v, self.v), 0.0)))

    def __repr__(self):
        return f"TangentVector(base={self.base!r}, v={np.array2string(self.v, precision=6)})"


class Isometry:
    """Element of O(m,1) preserving the future sheet."""

    __slots__ = ("matrix",)

    def __init__(self, matrix, check: bool = True):
        M = np.asarray(matrix, dtype=float)
        if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] - 1 not in SUPPORTED_DIMS:
            raise ValueError(f"bad isometry matrix shape {M.shape}")
        if check:
            J = metric(M.shape[0] - 1)
            err = np.abs(M.T @ J @ M - J).max()
            if err > ISOMETRY_TOL * max(1.0, float(np.abs(M).max()) ** 2):
                raise ValueError(f"matrix does not preserve the Lorentz form (error {err:.3g})")
            if M[0, 0] <= 0:
                raise ValueError("matrix swaps the two sheets")
        self.matrix = _frozen(M)

    @classmethod
    def identity(cls, m: int) -> "Isometry":
        return cls(np.eye(m + 1), check=False)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0] - 1

    def __matmul__(self, other: "Isometry") -> "Isometry":
        return Isometry(self.matrix @ other.matrix, check=False)

    def inverse(self) -> "Isometry":
        J = metric(self.dim)
        return Isometry(J @ self.matrix.T @ J, check=False)

    def det_sign(self) -> int:
        return int(np.sign(np.linalg.det(self.matrix)))

    def __repr__(self):
        return f"Isometry(m={self.dim})"


Point = "HPoint | IdealPoint"


def distance(p: HPoint, q: HPoint) -> float:
    c = -lorentz_dot(p, q)
    if c > 2.0:
        return float(np.arccosh(c))
    # chord form, accurate for nearby points far from the origin
    d = _as_vec(p) - _as_vec(q)
    return float(2 * np.arcsinh(np.sqrt(max(lorentz_dot(d, d), 0.0)) / 2))


def log_direction(x: HPoint, y) -> TangentVector:
    """Unit tangent at x pointing along the geodesic (or ray) towards y."""
    yv = _as_vec(y)
    w = yv + lorentz_dot(x, yv) * x.coords
    n2 = lorentz_dot(w, w)
    scale = 1.0 if isinstance(y, HPoint) else max(1.0, abs(lorentz_dot(x, yv)))
    if n2 <= (1e-12 * scale) ** 2:
        raise DegenerateDirectionError("target coincides with the base point")
    return TangentVector(x, w / np.sqrt(n2), check=False)


def exp_map(x: HPoint, v) -> HPoint:
    """Point at the end of the geodesic segment exp_x(v)."""
    v = _as_vec(v)
    t = np.sqrt(max(lorentz_dot(v, v), 0.0))
    if t < 1e-300:
        return x
    return HPoint.project(np.cosh(t) * x.coords + np.sinh(t) * v / t)


def midpoint(p: HPoint, q: HPoint) -> HPoint:
    return HPoint.project(p.coords + q.coords)


def apply_isometry(g: Isometry, p):
    if isinstance(p, TangentVector):
        return TangentVector(apply_isometry(g, p.base), g.matrix @ p.v, check=False)
    w = g.matrix @ p.coords
    if isinstance(p, IdealPoint):
        return IdealPoint.project(w)
    return HPoint.project(w)


def tangent_basis(x: HPoint) -> list[TangentVector]:
    """Orthonormal basis of the tangent space at x, positively oriented.

    Positive means det[x, e_1, ..., e_m] > 0.
    """
    E = tangent_frame(x)
    return [TangentVector(x, E[:, i], check=False) for i in range(E.shape[1])]


def tangent_frame(x: HPoint) -> np.ndarray:
    """The basis of :func:`tangent_basis` as columns of an (m+1, m) array."""
    xv = x.coords
    m = len(xv) - 1
    cols = []
    for i in range(1, m + 1):
        w = np.zeros(m + 1)
        w[i] = 1.0
        w = w + lorentz_dot(xv, w) * xv
        for e in cols:
            w = w - lorentz_dot(e, w) * e
        cols.append(w / np.sqrt(lorentz_dot(w, w)))
    E = np.column_stack(cols)
    if np.linalg.det(np.column_stack([xv, E])) < 0:
        E[:, -1] *= -1
    return E


def tangent_coords(E: np.ndarray, v) -> np.ndarray:
    """Coordinates of tangent vector(s) v in the frame E (rows of v if 2-D)."""
    J = metric(E.shape[0] - 1)
    return np.asarray(v, dtype=float) @ J @ E


def random_unit_tangent(x: HPoint, rng: np.random.Generator) -> TangentVector:
    E = tangent_frame(x)
    c = rng.standard_normal(E.shape[1])
    c /= np.linalg.norm(c)
    return TangentVector(x, E @ c, check=False)


def random_unit_coords(rng: np.random.Generator, n: int, m: int) -> np.ndarray:
    """n uniform points on S^{m-1}, as rows."""
    u = rng.standard_normal((n, m))
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    return u


# -- constructors for common isometries ----------------------------------------

def boost(m: int, axis: int, t: float) -> Isometry:
    """Translation of length t along the x_axis direction through the origin."""
    M = np.eye(m + 1)
    c, s = np.cosh(t), np.sinh(t)
    M[0, 0] = M[axis, axis] = c
    M[0, axis] = M[axis, 0] = s
    return Isometry(M)


def rotation(m: int, i: int, j: int, theta: float) -> Isometry:
    """Rotation by theta in the spatial coordinate plane (i, j)."""
    if i == 0 or j == 0:
        raise ValueError("rotation planes must be spatial")
    M = np.eye(m + 1)
    c, s = np.cos(theta), np.sin(theta)
    M[i, i] = M[j, j] = c
    M[i, j], M[j, i] = -s, s
    return Isometry(M)


def reflection(normal) -> Isometry:
    """Reflection in the hyperplane Lorentz-orthogonal to a spacelike vector."""
    n = np.asarray(normal, dtype=float)
    q = lorentz_dot(n, n)
    if q <= 0:
        raise ValueError("reflection normal must be spacelike")
    J = metric(len(n) - 1)
    return Isometry(np.eye(len(n)) - 2.0 * np.outer(n, J @ n) / q)


def transvection(p: HPoint, q: HPoint) -> Isometry:
    """Orientation preserving isometry sliding p to q along their geodesic."""
    m = p.dim
    if distance(p, q) < 1e-14:
        return Isometry.identity(m)
    # reflect in the bisector, then in the hyperplane through q orthogonal to the geodesic
    r1 = reflection(p.coords - q.coords)
    r2 = reflection(log_direction(q, p).v)
    return Isometry((r2 @ r1).matrix, check=False)


def random_isometry(m: int, rng: np.random.Generator, scale: float = 1.0) -> Isometry:
    """A random orientation preserving isometry: rotation followed by a boost."""
    A = rng.standard_normal((m, m))
    Q, R = np.linalg.qr(A)
    Q = Q @ np.diag(np.sign(np.diag(R)))
    if np.linalg.det(Q) < 0:
        Q[:, 0] *= -1
    M = np.eye(m + 1)
    M[1:, 1:] = Q
    t = scale * rng.random()
    axis = 1 + int(rng.integers(m))
    return boost(m, axis, t) @ Isometry(M)


# -- JSON point encoding ---------------------------------------------------------

def point_to_json(p) -> dict:
    return {"kind": p.kind, "coords": [float(c) for c in p.coords]}


def point_from_json(d: dict):
    kind = d.get("kind")
    if kind == "finite":
        return HPoint(d["coords"])
    if kind == "ideal":
        return IdealPoint(d["coords"])
    raise ValueError(f"unknown point kind {kind!r}")
