"""The three Hadamard model spaces: Euclidean space, hyperbolic space in the
hyperboloid model, and finite metric trees."""
from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components, shortest_path

from .geometry import GeometryError, Point, Space, SpaceTag

HYPERBOLOID_TOL = 1e-10


class EuclideanSpace(Space):
    tag = SpaceTag.EUCLIDEAN

    def __init__(self, dim: int):
        if int(dim) < 1:
            raise GeometryError("dimension must be positive")
        self.dim = int(dim)

    def __repr__(self):
        return f"EuclideanSpace({self.dim})"

    def point(self, coords) -> Point:
        c = tuple(float(v) for v in coords)
        if len(c) != self.dim:
            raise GeometryError(f"expected {self.dim} coordinates, got {len(c)}")
        return Point(self.tag, c)

    def origin(self) -> Point:
        return Point(self.tag, (0.0,) * self.dim)

    def array(self, x: Point) -> np.ndarray:
        return np.asarray(x.coords, dtype=float)

    def _fits(self, p):
        return len(p.coords) == self.dim

    def _dist(self, x, y):
        return math.dist(x.coords, y.coords)

    def sqdist(self, x, y):
        self.check(x, y)
        return math.fsum((a - b) * (a - b) for a, b in zip(x.coords, y.coords))

    def _combine(self, x, y, alpha):
        return Point(self.tag, tuple(a + alpha * (b - a) for a, b in zip(x.coords, y.coords)))

    def random_point(self, rng, center=None, radius=1.0):
        c = np.zeros(self.dim) if center is None else self.array(center)
        u = rng.standard_normal(self.dim)
        u /= np.linalg.norm(u)
        rho = radius * rng.uniform() ** (1.0 / self.dim)
        return self.point(c + rho * u)

    def random_on_sphere(self, rng, center, radius):
        u = rng.standard_normal(self.dim)
        u /= np.linalg.norm(u)
        return self.point(self.array(center) + radius * u)

    def to_native(self, x):
        return list(x.coords)

    def from_native(self, obj):
        return self.point(obj)

    def native_columns(self):
        return [f"x{i}" for i in range(self.dim)]


def _sinh_ratio(a: float, d: float) -> float:
    """sinh(a) / sinh(d) for 0 <= a <= d, d > 0, without overflow."""
    if d < 20.0:
        return math.sinh(a) / math.sinh(d)
    return math.exp(a - d) * math.expm1(-2.0 * a) / math.expm1(-2.0 * d)


class HyperbolicSpace(Space):
    """Hyperbolic n-space as the upper sheet of the hyperboloid <x,x> = -1.

    Points carry ``n + 1`` coordinates, time-like coordinate last.  The time
    coordinate is always recomputed from the spatial ones, so the hyperboloid
    constraint holds to rounding after every operation.  Poincare-ball
    coordinates are used for input and output only.
    """

    tag = SpaceTag.HYPERBOLIC

    def __init__(self, dim: int):
        if int(dim) < 1:
            raise GeometryError("dimension must be positive")
        self.dim = int(dim)

    def __repr__(self):
        return f"HyperbolicSpace({self.dim})"

    # construction and conversion
    def from_spatial(self, spatial) -> Point:
        s = tuple(float(v) for v in spatial)
        if len(s) != self.dim:
            raise GeometryError(f"expected {self.dim} spatial coordinates, got {len(s)}")
        return Point(self.tag, s + (math.sqrt(1.0 + math.fsum(v * v for v in s)),))

    def point(self, coords) -> Point:
        """Point from full hyperboloid coordinates; validates the constraint."""
        c = [float(v) for v in coords]
        if len(c) != self.dim + 1:
            raise GeometryError(f"expected {self.dim + 1} hyperboloid coordinates")
        x = self.from_spatial(c[:-1])
        if c[-1] <= 0 or abs(c[-1] - x.coords[-1]) > HYPERBOLOID_TOL * max(1.0, c[-1]):
            raise GeometryError("coordinates are not on the upper hyperboloid sheet")
        return x

    def from_poincare(self, p) -> Point:
        p = [float(v) for v in p]
        if len(p) != self.dim:
            raise GeometryError(f"expected {self.dim} Poincare coordinates")
        r2 = math.fsum(v * v for v in p)
        if r2 >= 1.0:
            raise GeometryError("Poincare coordinates must lie in the open unit ball")
        return self.from_spatial([2.0 * v / (1.0 - r2) for v in p])

    def to_poincare(self, x: Point) -> list[float]:
        self.check(x)
        t = x.coords[-1]
        return [v / (1.0 + t) for v in x.coords[:-1]]

    def origin(self) -> Point:
        return self.from_spatial([0.0] * self.dim)

    def array(self, x: Point) -> np.ndarray:
        return np.asarray(x.coords, dtype=float)

    def constraint_residual(self, x: Point) -> float:
        """|<x,x> + 1| in the Minkowski form."""
        return abs(minkowski(x.coords, x.coords) + 1.0)

    def _fits(self, p):
        return len(p.coords) == self.dim + 1

    # metric
    def _dist(self, x, y):
        # scalar twin of _chordal_sq; this is the hot path
        sx, sy = x.coords[:-1], y.coords[:-1]
        ds = [a - b for a, b in zip(sx, sy)]
        sigma = [a + b for a, b in zip(sx, sy)]
        n2 = math.fsum(v * v for v in sigma)
        if n2 == 0.0:
            q = math.fsum(v * v for v in ds)
        else:
            norm = math.sqrt(n2)
            a = math.fsum(u * v for u, v in zip(ds, sigma)) / norm
            k = a / norm
            perp2 = math.fsum((u - k * v) ** 2 for u, v in zip(ds, sigma))
            r = (a / (x.coords[-1] + y.coords[-1])) ** 2
            q = (perp2 + 4.0 * r) / (1.0 - r)
        return 2.0 * math.asinh(0.5 * math.sqrt(q)) if q > 0.0 else 0.0

    def _combine(self, x, y, alpha):
        d = self._dist(x, y)
        if d == 0.0:
            return x
        wa = _sinh_ratio((1.0 - alpha) * d, d)
        wb = _sinh_ratio(alpha * d, d)
        return self.from_spatial([wa * a + wb * b for a, b in zip(x.coords[:-1], y.coords[:-1])])

    # tangent-space helpers (numpy, used by the Newton solver and samplers)
    def exp(self, base: np.ndarray, v: np.ndarray) -> Point:
        n = math.sqrt(max(float(minkowski(v, v)), 0.0))
        if n == 0.0:
            return self.from_spatial(base[:-1])
        y = math.cosh(n) * base + (math.sinh(n) / n) * v
        return self.from_spatial(y[:-1])

    def log(self, base: np.ndarray, p: np.ndarray) -> np.ndarray:
        """Tangent vectors at ``base`` pointing to each row of ``p``."""
        p = np.atleast_2d(np.asarray(p, dtype=float))
        q = _chordal_sq(p[:, :-1], base[:-1], p[:, -1], base[-1])
        d = 2.0 * np.arcsinh(0.5 * np.sqrt(q))
        inner = 1.0 + 0.5 * q
        with np.errstate(invalid="ignore", divide="ignore"):
            factor = np.where(d > 1e-8, d / np.sinh(d), 1.0)
        return factor[:, None] * (p - inner[:, None] * base)

    def boost(self, center: Point, y: np.ndarray) -> Point:
        """Apply the Lorentz boost taking the origin to ``center``."""
        s = np.asarray(center.coords[:-1])
        t = center.coords[-1]
        v, tau = y[:-1], y[-1]
        sv = float(s @ v)
        spatial = v + s * (sv / (1.0 + t)) + s * tau
        return self.from_spatial(spatial)

    def _at_distance(self, rng, center, rho):
        u = rng.standard_normal(self.dim)
        u /= np.linalg.norm(u)
        y = np.append(math.sinh(rho) * u, math.cosh(rho))
        if center is None:
            return self.from_spatial(y[:-1])
        return self.boost(center, y)

    def random_point(self, rng, center=None, radius=1.0):
        rho = radius * rng.uniform() ** (1.0 / self.dim)
        return self._at_distance(rng, center, rho)

    def random_on_sphere(self, rng, center, radius):
        return self._at_distance(rng, center, radius)

    def to_native(self, x):
        return self.to_poincare(x)

    def from_native(self, obj):
        return self.from_poincare(obj)

    def native_columns(self):
        return [f"p{i}" for i in range(self.dim)]


def _chordal_sq(sx, sy, tx, ty):
    """``2 cosh d - 2`` for hyperboloid points given by spatial parts and times.

    Broadcasts over leading axes.  With ``sigma = sx + sy``, ``tau = tx + ty``
    and ``sx - sy = a sigma/|sigma| + p`` (p orthogonal to sigma) one has
    ``q = (|p|^2 + 4 a^2 / tau^2) / (1 - a^2 / tau^2)`` exactly; every term is
    a sum of nonnegative parts, so nothing cancels far from the origin.
    """
    ds = sx - sy
    sigma = sx + sy
    tau = np.asarray(tx + ty, dtype=float)
    norm = np.sqrt((sigma * sigma).sum(axis=-1))
    safe = np.where(norm > 0.0, norm, 1.0)
    a = (ds * sigma).sum(axis=-1) / safe
    perp = ds - (a / safe)[..., None] * sigma
    r = (a / tau) ** 2
    q = ((perp * perp).sum(axis=-1) + 4.0 * r) / (1.0 - r)
    out = np.where(norm > 0.0, q, (ds * ds).sum(axis=-1))
    return float(out) if out.ndim == 0 else out


def minkowski(x, y):
    """Minkowski form with the time coordinate last; broadcasts over rows."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return (x[..., :-1] * y[..., :-1]).sum(axis=-1) - x[..., -1] * y[..., -1]


class TreeSpace(Space):
    """A finite metric tree with positive edge lengths.

    Points are ``(edge_id, offset)`` with the offset measured from the first
    endpoint listed for that edge.  Points sitting on a vertex are stored on
    the smallest incident edge id, so equality is canonical.
    """

    tag = SpaceTag.TREE

    def __init__(self, n_vertices: int, edges):
        n = int(n_vertices)
        if n < 2:
            raise GeometryError("a tree needs at least two vertices")
        clean = []
        seen = set()
        for e in edges:
            if len(e) != 3:
                raise GeometryError(f"edge {e!r} is not [u, v, length]")
            u, v, length = int(e[0]), int(e[1]), float(e[2])
            if not (0 <= u < n and 0 <= v < n):
                raise GeometryError(f"edge {e!r} references a missing vertex")
            if u == v:
                raise GeometryError(f"self-loop at vertex {u}")
            if not (length > 0.0 and math.isfinite(length)):
                raise GeometryError(f"edge {e!r} has non-positive length")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise GeometryError(f"repeated edge {key} forms a cycle")
            seen.add(key)
            clean.append((u, v, length))
        if len(clean) > n - 1:
            raise GeometryError("edge set contains a cycle")
        rows = [u for u, _, _ in clean]
        cols = [v for _, v, _ in clean]
        w = [length for _, _, length in clean]
        graph = coo_matrix((w, (rows, cols)), shape=(n, n)).tocsr()
        n_comp, _ = connected_components(graph, directed=False)
        if n_comp != 1 or len(clean) != n - 1:
            raise GeometryError("graph is disconnected")

        self.n_vertices = n
        self.edges = tuple(clean)
        dmat, pred = shortest_path(graph, directed=False, return_predecessors=True)
        # (a + b) / 2 is exactly symmetric, so d(x, y) == d(y, x) bit for bit
        dmat = 0.5 * (dmat + dmat.T)
        self.vertex_dist = dmat
        self._D = dmat.tolist()
        # _pred[b][c]: neighbour of c on the path from c towards b
        self._pred = pred.tolist()
        self._edge_between = {}
        for i, (u, v, _) in enumerate(clean):
            self._edge_between[(u, v)] = i
            self._edge_between[(v, u)] = i
        self._vertex_rep = [None] * n
        for i, (u, v, length) in enumerate(clean):
            if self._vertex_rep[u] is None:
                self._vertex_rep[u] = (i, 0.0)
            if self._vertex_rep[v] is None:
                self._vertex_rep[v] = (i, length)
        self.lengths = np.array(w)

    def __repr__(self):
        return f"TreeSpace({self.n_vertices} vertices)"

    @classmethod
    def from_json(cls, doc) -> "TreeSpace":
        if isinstance(doc, (str, bytes)):
            doc = json.loads(doc)
        if not isinstance(doc, dict) or "vertices" not in doc or "edges" not in doc:
            raise GeometryError('tree document needs "vertices" and "edges"')
        return cls(doc["vertices"], doc["edges"])

    @classmethod
    def load(cls, path) -> "TreeSpace":
        return cls.from_json(Path(path).read_text())

    def to_json(self) -> dict:
        return {"vertices": self.n_vertices, "edges": [list(e) for e in self.edges]}

    @classmethod
    def star(cls, k: int = 3, length: float = 1.0) -> "TreeSpace":
        """Hub 0 joined to leaves 1..k; edge i-1 joins the hub to leaf i."""
        return cls(k + 1, [(0, i, length) for i in range(1, k + 1)])

    # points
    def vertex_point(self, v: int) -> Point:
        if not 0 <= v < self.n_vertices:
            raise GeometryError(f"no vertex {v}")
        return Point(self.tag, self._vertex_rep[v])

    def point(self, edge: int, offset: float) -> Point:
        edge = int(edge)
        if not 0 <= edge < len(self.edges):
            raise GeometryError(f"no edge {edge}")
        length = self.edges[edge][2]
        offset = float(offset)
        if not -1e-12 * length <= offset <= length * (1 + 1e-12):
            raise GeometryError(f"offset {offset} outside edge {edge} of length {length}")
        return self._canonical(edge, offset)

    def _canonical(self, e, t):
        u, v, length = self.edges[e]
        snap = 1e-14 * length
        if t <= snap:
            return Point(self.tag, self._vertex_rep[u])
        if t >= length - snap:
            return Point(self.tag, self._vertex_rep[v])
        return Point(self.tag, (e, t))

    def _fits(self, p):
        return len(p.coords) == 2 and 0 <= p.coords[0] < len(self.edges)

    def vertex_of(self, x: Point):
        """Vertex id if x sits on a vertex, else None."""
        e, t = x.coords
        u, v, length = self.edges[e]
        if t == 0.0:
            return u
        if t == length:
            return v
        return None

    def _ends(self, x):
        e, t = x.coords
        u, v, length = self.edges[e]
        return ((u, t), (v, length - t))

    def distances_from(self, x: Point) -> np.ndarray:
        """Distance from x to every vertex."""
        self.check(x)
        e, t = x.coords
        u, v, length = self.edges[e]
        return np.minimum(t + self.vertex_dist[u], (length - t) + self.vertex_dist[v])

    def _dist(self, x, y):
        ex, tx = x.coords
        ey, ty = y.coords
        if ex == ey:
            return abs(tx - ty)
        D = self._D
        best = math.inf
        for a, da in self._ends(x):
            row = D[a]
            for b, db in self._ends(y):
                s = (da + db) + row[b]
                if s < best:
                    best = s
        return best

    def _route(self, x, y):
        best = None
        for a, da in self._ends(x):
            for b, db in self._ends(y):
                s = (da + db) + self._D[a][b]
                if best is None or s < best[0]:
                    best = (s, a, da, b, db)
        return best

    def _toward(self, e, from_vertex, s):
        """Point on edge e at distance s from its endpoint ``from_vertex``."""
        u, v, length = self.edges[e]
        s = min(max(s, 0.0), length)
        return self._canonical(e, s if from_vertex == u else length - s)

    def _combine(self, x, y, alpha):
        ex, tx = x.coords
        ey, ty = y.coords
        if ex == ey:
            return self._canonical(ex, tx + alpha * (ty - tx))
        total, a, da, b, db = self._route(x, y)
        s = alpha * total
        if s <= da:
            u = self.edges[ex][0]
            return self._canonical(ex, tx - s if a == u else tx + s)
        s -= da
        cur = a
        while cur != b:
            nxt = self._pred[b][cur]
            e = self._edge_between[(cur, nxt)]
            length = self.edges[e][2]
            if s <= length:
                return self._toward(e, cur, s)
            s -= length
            cur = nxt
        u = self.edges[ey][0]
        s = min(s, db)
        return self._canonical(ey, s if b == u else self.edges[ey][2] - s)

    # sampling
    def random_point(self, rng, center=None, radius=None):
        w = self.lengths / self.lengths.sum()
        e = int(rng.choice(len(self.edges), p=w))
        y = self._canonical(e, float(rng.uniform(0.0, self.edges[e][2])))
        if center is not None and radius is not None:
            d = self._dist(center, y)
            if d > radius:
                y = self.combine(center, y, radius * float(rng.uniform()) / d)
        return y

    def random_on_sphere(self, rng, center, radius):
        """A random point at distance ``radius`` from ``center``, or None."""
        dv = self.distances_from(center)
        ce, ct = center.coords
        on_edge_interior = self.vertex_of(center) is None
        candidates = []
        for i, (u, v, length) in enumerate(self.edges):
            if on_edge_interior and i == ce:
                for t in (ct - radius, ct + radius):
                    if 0.0 <= t <= length:
                        candidates.append((i, t))
                continue
            near, far_is_v = (u, True) if dv[u] <= dv[v] else (v, False)
            lo = dv[near]
            if lo <= radius <= lo + length:
                s = radius - lo
                candidates.append((i, s if far_is_v else length - s))
        if not candidates:
            return None
        e, t = candidates[int(rng.integers(len(candidates)))]
        return self._canonical(e, t)

    # I/O
    def to_native(self, x):
        return {"edge": x.coords[0], "offset": x.coords[1]}

    def from_native(self, obj):
        if isinstance(obj, dict) and "vertex" in obj:
            return self.vertex_point(int(obj["vertex"]))
        if isinstance(obj, dict) and "edge" in obj:
            return self.point(obj["edge"], obj.get("offset", 0.0))
        raise GeometryError(f"cannot read tree point from {obj!r}")

    def native_columns(self):
        return ["edge", "offset"]
