"""Resolved compact sets as point clouds with boundary identification.

Full-dimensional families (square, disk, cusps) are grid discretizations at
spacing h of the set placed inside the box [-1/4, 1/4]^d; fractal families
(cantor, sierpinski) are the exact finite-depth iterates.  Boundary points of
grid families are detected by erosion: a point is boundary iff one of its 2d
axis neighbors at step h lies outside the set.  Thin families are all
boundary.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

BOX_HALF = 0.25  # clouds live in the box [-1/4, 1/4]^d

_FULL_DIM_FAMILIES = {"square", "disk", "cusp_out", "cusp_in"}


@dataclass(frozen=True)
class SetSpec:
    """Parameters selecting one of the built-in set families.

    family: square | disk | segment | cusp_out | cusp_in | cantor | sierpinski | points_file
    h: grid spacing for full-dimensional families (also the segment step)
    depth: recursion depth for cantor/sierpinski
    p: cusp exponent (>= 1)
    scale: side length / radius / segment length, default fills the box
    path, dim: source file and dimension for points_file
    """

    family: str
    h: float = 2.0 ** -8
    depth: int = 6
    p: float = 2.0
    scale: float | None = None
    path: str | None = None
    dim: int = 2

    def label(self) -> str:
        if self.family in ("cantor", "sierpinski"):
            return f"{self.family}(depth={self.depth})"
        if self.family in ("cusp_out", "cusp_in"):
            return f"{self.family}(p={self.p:g},h={self.h:g})"
        if self.family == "points_file":
            return f"points_file({self.path})"
        return f"{self.family}(h={self.h:g})"


@dataclass(frozen=True)
class PointCloud:
    """A finite resolved compact set K in the box [-1/4, 1/4]^d."""

    dim: int
    points: np.ndarray          # (m, d)
    resolution: float           # grid spacing, or finest generation scale for fractals
    boundary: np.ndarray        # (m,) bool
    label: str
    fractal: bool = False
    _tree: cKDTree = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[0] == 0:
            raise ValueError("cloud must be a nonempty (m, d) array")
        if pts.shape[1] != self.dim:
            raise ValueError("point dimension mismatch")
        if np.max(np.abs(pts)) > BOX_HALF + 1e-12:
            raise ValueError("cloud escapes the box [-1/4, 1/4]^d")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "boundary", np.asarray(self.boundary, dtype=bool))
        object.__setattr__(self, "_tree", cKDTree(pts))

    @property
    def n_points(self) -> int:
        return self.points.shape[0]

    def diameter(self) -> float:
        lo = self.points.min(axis=0)
        hi = self.points.max(axis=0)
        return float(np.linalg.norm(hi - lo))

    def nearest(self, x):
        """(distance, index) of the nearest cloud point, for a point or batch."""
        d, i = self._tree.query(np.asarray(x, dtype=float))
        return d, i

    def dist(self, x):
        return self.nearest(x)[0]


def _grid_cloud(member, h: float, lo, hi, label: str) -> PointCloud:
    """Scan the integer grid of spacing h on [lo, hi]^d and keep member(idx) points.

    `member` takes integer index vectors (points are idx * h) so membership is
    exact for the analytic families.
    """
    d = len(lo)
    ranges = [np.arange(int(round(lo[j] / h)), int(round(hi[j] / h)) + 1) for j in range(d)]
    mesh = np.meshgrid(*ranges, indexing="ij")
    idx = np.stack([m.ravel() for m in mesh], axis=1)  # (M, d) ints
    inside = member(idx)
    kept = idx[inside]
    # erosion: boundary iff some axis neighbor at distance h is outside
    bnd = np.zeros(kept.shape[0], dtype=bool)
    for j in range(d):
        for s in (-1, 1):
            nb = kept.copy()
            nb[:, j] += s
            bnd |= ~member(nb)
    return PointCloud(d, kept * h, h, bnd, label)


def _cantor_endpoints(depth: int) -> np.ndarray:
    """Endpoints of the depth-g middle-thirds iterate of [0, 1/4]."""
    intervals = [(0.0, BOX_HALF)]
    for _ in range(depth):
        nxt = []
        for a, b in intervals:
            third = (b - a) / 3.0
            nxt.append((a, a + third))
            nxt.append((b - third, b))
        intervals = nxt
    pts = []
    for a, b in intervals:
        pts.append(a)
        pts.append(b)
    return np.array(sorted(set(pts)))


def _sierpinski_vertices(depth: int) -> np.ndarray:
    """Vertex set of the depth-g Sierpinski iterate, scaled into the box."""
    s = 2 * BOX_HALF
    base = np.array([[-s / 2, -s / 2], [s / 2, -s / 2], [0.0, s / 2 * np.sqrt(3) - s / 2]])
    # shrink so the top vertex stays inside the box
    base *= BOX_HALF / np.max(np.abs(base))
    tris = [base]
    for _ in range(depth):
        nxt = []
        for t in tris:
            a, b, c = t
            ab, bc, ca = (a + b) / 2, (b + c) / 2, (c + a) / 2
            nxt.append(np.array([a, ab, ca]))
            nxt.append(np.array([ab, b, bc]))
            nxt.append(np.array([ca, bc, c]))
        tris = nxt
    verts = np.concatenate(tris, axis=0)
    # dedupe exactly: coordinates are dyadic combinations, so byte equality is safe
    seen = {}
    for v in verts:
        seen.setdefault(v.tobytes(), v)
    out = np.array(sorted(seen.values(), key=lambda v: (v[0], v[1])))
    return out


def generate(spec: SetSpec) -> PointCloud:
    """Deterministic cloud for the given spec; identical spec gives an identical cloud."""
    fam = spec.family
    h = spec.h
    if fam == "square":
        side = spec.scale if spec.scale is not None else 2 * BOX_HALF
        n = int(round(side / 2 / h))
        member = lambda idx: np.all(np.abs(idx) <= n, axis=1)
        return _grid_cloud(member, h, (-side / 2, -side / 2), (side / 2, side / 2), spec.label())
    if fam == "disk":
        r = spec.scale if spec.scale is not None else BOX_HALF
        n = int(round(r / h))
        member = lambda idx: np.sum(idx.astype(float) ** 2, axis=1) * h * h <= r * r + 1e-12
        return _grid_cloud(member, h, (-r, -r), (r, r), spec.label())
    if fam == "segment":
        length = spec.scale if spec.scale is not None else 2 * BOX_HALF
        n = int(round(length / 2 / h))
        xs = np.arange(-n, n + 1) * h
        pts = np.stack([xs, np.zeros_like(xs)], axis=1)
        return PointCloud(2, pts, h, np.ones(len(xs), dtype=bool), spec.label())
    if fam == "cusp_out":
        # {(x, y): 0 <= x <= 1/4, |y| <= x^p}, tip at the origin
        length = spec.scale if spec.scale is not None else BOX_HALF
        nmax = int(round(length / h))

        def member(idx):
            x = idx[:, 0].astype(float) * h
            y = idx[:, 1].astype(float) * h
            return (idx[:, 0] >= 0) & (idx[:, 0] <= nmax) & (np.abs(y) <= x ** spec.p + 1e-15)

        return _grid_cloud(member, h, (0.0, -length), (length, length), spec.label())
    if fam == "cusp_in":
        # box with a cusp-shaped notch removed, cusp pointing into the set
        half = spec.scale if spec.scale is not None else BOX_HALF / 2

        def member(idx):
            x = idx[:, 0].astype(float) * h
            y = idx[:, 1].astype(float) * h
            in_box = (np.abs(x) <= half + 1e-15) & (np.abs(y) <= half + 1e-15)
            in_notch = (x > 0) & (np.abs(y) < x ** spec.p - 1e-15)
            return in_box & ~in_notch

        return _grid_cloud(member, h, (-half, -half), (half, half), spec.label())
    if fam == "cantor":
        if spec.depth < 1:
            raise ValueError("depth must be >= 1")
        pts = _cantor_endpoints(spec.depth)[:, None]
        scale = BOX_HALF * 3.0 ** -spec.depth
        return PointCloud(1, pts, scale, np.ones(len(pts), dtype=bool), spec.label(), fractal=True)
    if fam == "sierpinski":
        if spec.depth < 1:
            raise ValueError("depth must be >= 1")
        pts = _sierpinski_vertices(spec.depth)
        scale = 2 * BOX_HALF * 2.0 ** -spec.depth
        return PointCloud(2, pts, scale, np.ones(len(pts), dtype=bool), spec.label(), fractal=True)
    if fam == "points_file":
        if spec.path is None:
            raise ValueError("points_file needs a path")
        return read_points_file(spec.path, spec.dim)
    raise ValueError(f"unknown set family: {fam!r}")


def boundary_points(cloud: PointCloud) -> PointCloud:
    """Sub-cloud of boundary-flagged points."""
    mask = cloud.boundary
    return PointCloud(cloud.dim, cloud.points[mask], cloud.resolution,
                      np.ones(int(mask.sum()), dtype=bool), cloud.label + "|boundary",
                      fractal=cloud.fractal)


def ball_restrict(cloud: PointCloud, x0, eps: float) -> np.ndarray:
    """Indices of cloud points in the closed Euclidean ball B(x0, eps)."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    x0 = np.asarray(x0, dtype=float)
    d2 = np.sum((cloud.points - x0) ** 2, axis=1)
    return np.nonzero(d2 <= eps * eps + 1e-15)[0]


def dist_to_affine_hull(x, anchors) -> float:
    """Distance from x to the affine hull of the anchor points.

    Gram-Schmidt with re-orthogonalization on the anchor differences;
    directions below 1e-12 are dropped.
    """
    anchors = np.atleast_2d(np.asarray(anchors, dtype=float))
    if anchors.shape[0] == 0:
        raise ValueError("anchors must be nonempty")
    x = np.asarray(x, dtype=float)
    base = anchors[0]
    basis = []
    for a in anchors[1:]:
        v = a - base
        for q in basis:
            v = v - np.dot(v, q) * q
        for q in basis:  # second pass for robustness
            v = v - np.dot(v, q) * q
        nv = np.linalg.norm(v)
        if nv >= 1e-12:
            basis.append(v / nv)
    r = x - base
    for q in basis:
        r = r - np.dot(r, q) * q
    return float(np.linalg.norm(r))


def write_points_file(path: str, cloud: PointCloud) -> None:
    """Plain text, one point per line: d coordinates then a 0/1 boundary flag."""
    with open(path, "w") as f:
        for p, b in zip(cloud.points, cloud.boundary):
            coords = " ".join(repr(float(c)) for c in p)
            f.write(f"{coords} {int(b)}\n")


def read_points_file(path: str, dim: int) -> PointCloud:
    """Read the points_file format; a missing flag column means all boundary."""
    pts = []
    flags = []
    with open(path) as f:
        for ln, line in enumerate(f, 1):
            parts = line.split()
            if not parts:
                continue
            if len(parts) == dim:
                flag = True
            elif len(parts) == dim + 1:
                flag = bool(int(parts[-1]))
            else:
                raise ValueError(f"{path}:{ln}: expected {dim} or {dim + 1} columns, got {len(parts)}")
            pts.append([float(v) for v in parts[:dim]])
            flags.append(flag)
    if not pts:
        raise ValueError(f"{path}: no points")
    arr = np.asarray(pts)
    res = _infer_resolution(arr)
    return PointCloud(dim, arr, res, np.asarray(flags, dtype=bool), f"points_file({path})")


def _infer_resolution(pts: np.ndarray) -> float:
    tree = cKDTree(pts)
    d, _ = tree.query(pts, k=min(2, len(pts)))
    if len(pts) == 1:
        return 1e-3
    return float(np.min(d[:, 1]))
