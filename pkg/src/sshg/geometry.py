"""Low-level 3-D geometry: rigid motions, sphere projection, convex hulls,
equivariant frames, and a brute-force congruence test.

Coordinates are numpy float64 arrays in Angstrom, shape (3,) for single
points and (n, 3) for clouds. Everything here is a pure function of its
inputs; constructed objects are effectively immutable.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.spatial import ConvexHull, QhullError, cKDTree

# Two points closer than this are treated as coincident.
COINCIDENT_TOL = 1e-9
ORTHOGONALITY_TOL = 1e-9

# Frame construction: below these the sign/ordering rules are ambiguous and
# the lexicographic fallback kicks in.
_MOMENT_TOL = 1e-9
_EIGENGAP_TOL = 1e-9
_LEX_SCALE = 1e9

# Cap on tie-break permutations tried by the congruence test.
_MAX_TIE_COMBOS = 20000


class DegeneratePoint(ValueError):
    """A point coincides with the projection center."""


class DegenerateConfiguration(ValueError):
    """Point configuration admits no valid hull edge set."""


def as_vec3(value) -> np.ndarray:
    """Coerce to a finite (3,) float64 vector."""
    v = np.asarray(value, dtype=float).reshape(3)
    if not np.all(np.isfinite(v)):
        raise ValueError(f"non-finite coordinate: {value!r}")
    return v


@dataclass(frozen=True)
class RigidMotion:
    """Element of E(3): orthogonal 3x3 matrix (det +1 or -1) plus translation."""

    rotation: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        q = np.asarray(self.rotation, dtype=float).reshape(3, 3)
        t = as_vec3(self.translation)
        if np.max(np.abs(q.T @ q - np.eye(3))) > ORTHOGONALITY_TOL:
            raise ValueError("rotation matrix is not orthogonal")
        if abs(abs(np.linalg.det(q)) - 1.0) > 1e-9:
            raise ValueError("rotation matrix determinant must be +1 or -1")
        q.setflags(write=False)
        t.setflags(write=False)
        object.__setattr__(self, "rotation", q)
        object.__setattr__(self, "translation", t)

    @property
    def det(self) -> float:
        return float(np.linalg.det(self.rotation))

    def apply(self, coords: np.ndarray) -> np.ndarray:
        """Map points (shape (3,) or (n, 3)) through Q.x + t."""
        return np.asarray(coords, dtype=float) @ self.rotation.T + self.translation

    @staticmethod
    def identity() -> "RigidMotion":
        return RigidMotion(np.eye(3), np.zeros(3))


def random_rigid_motion(rng: np.random.Generator,
                        max_translation: float = 100.0,
                        allow_reflection: bool = True) -> RigidMotion:
    """Draw a random rigid motion; reflections (det -1) half the time when allowed."""
    a = rng.standard_normal((3, 3))
    q, r = np.linalg.qr(a)
    q = q @ np.diag(np.sign(np.diag(r)))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    if allow_reflection and rng.random() < 0.5:
        q[:, 0] = -q[:, 0]
    t = rng.uniform(-max_translation, max_translation, 3)
    return RigidMotion(q, t)


@dataclass(frozen=True)
class PointCloud:
    """Ordered points with integer feature codes.

    Invariants checked on construction: nonempty, finite coordinates, and no
    two points within COINCIDENT_TOL of each other.
    """

    coords: np.ndarray
    features: np.ndarray = None

    def __post_init__(self):
        c = np.asarray(self.coords, dtype=float)
        if c.ndim == 1:
            c = c.reshape(1, 3)
        if c.ndim != 2 or c.shape[1] != 3 or c.shape[0] == 0:
            raise ValueError(f"expected nonempty (n, 3) coordinates, got shape {c.shape}")
        if not np.all(np.isfinite(c)):
            raise ValueError("non-finite coordinates in point cloud")
        if self.features is None:
            f = np.zeros(len(c), dtype=np.int64)
        else:
            f = np.asarray(self.features, dtype=np.int64).reshape(len(c))
        if len(c) > 1 and cKDTree(c).query_pairs(COINCIDENT_TOL):
            raise ValueError("coincident points in point cloud")
        c.setflags(write=False)
        f.setflags(write=False)
        object.__setattr__(self, "coords", c)
        object.__setattr__(self, "features", f)

    def __len__(self) -> int:
        return len(self.coords)


def centroid(cloud: PointCloud) -> np.ndarray:
    """Arithmetic mean of the cloud coordinates."""
    return cloud.coords.mean(axis=0)


def unit_directions(coords: np.ndarray, center: np.ndarray) -> np.ndarray:
    """Unit vectors from center to each point; DegeneratePoint if any point sits on it."""
    diffs = np.asarray(coords, dtype=float) - as_vec3(center)
    norms = np.linalg.norm(diffs, axis=1)
    bad = np.nonzero(norms <= COINCIDENT_TOL)[0]
    if bad.size:
        raise DegeneratePoint(f"point {bad[0]} coincides with the projection center")
    return diffs / norms[:, None]


def project_to_sphere(cloud: PointCloud, center) -> PointCloud:
    """Project each point onto the unit sphere about `center`."""
    return PointCloud(unit_directions(cloud.coords, center), cloud.features)


def convex_hull_sphere(points) -> list[tuple[int, int]]:
    """Edge set of the 3-D convex hull of points on the unit sphere.

    Returns sorted (i, j) index pairs with i < j. One point gives no edges,
    two give the single edge, three always give the triangle. Coplanar or
    collinear configurations fall back to a planar construction that stays
    connected and within the 3n - 6 bound.
    """
    pts = np.asarray(points, dtype=float).reshape(-1, 3)
    n = len(pts)
    if n == 1:
        return []
    if n == 2:
        return [(0, 1)]
    if cKDTree(pts).query_pairs(COINCIDENT_TOL):
        raise DegenerateConfiguration("duplicate directions on the sphere")
    if n == 3:
        return [(0, 1), (0, 2), (1, 2)]
    try:
        hull = ConvexHull(pts)
    except QhullError:
        return _planar_hull_edges(pts)
    edges = set()
    for simplex in hull.simplices:
        for a, b in itertools.combinations(simplex.tolist(), 2):
            edges.add((a, b) if a < b else (b, a))
    # Points dropped by qhull (numerically inside a facet) still need a link.
    present = set(itertools.chain.from_iterable(edges))
    for m in sorted(set(range(n)) - present):
        others = [i for i in range(n) if i != m and i in present]
        nearest = min(others, key=lambda i: float(np.linalg.norm(pts[i] - pts[m])))
        edges.add((m, nearest) if m < nearest else (nearest, m))
        present.add(m)
    return sorted(edges)


def _planar_hull_edges(pts: np.ndarray) -> list[tuple[int, int]]:
    """Fallback when all points are coplanar: 2-D hull cycle plus a fan over
    interior points anchored at the lexicographically smallest one."""
    n = len(pts)
    center = pts.mean(axis=0)
    _, _, vt = np.linalg.svd(pts - center)
    xy = (pts - center) @ vt[:2].T
    try:
        hull = ConvexHull(xy)
    except QhullError:
        # Collinear: path through the points ordered along the line.
        order = sorted(range(n), key=lambda i: (float(xy[i, 0]), i))
        return sorted(
            (a, b) if a < b else (b, a)
            for a, b in zip(order, order[1:])
        )
    cycle = hull.vertices.tolist()
    edges = set()
    for a, b in zip(cycle, cycle[1:] + cycle[:1]):
        edges.add((a, b) if a < b else (b, a))
    interior = sorted(set(range(n)) - set(cycle))
    if interior:
        apex = min(interior, key=lambda i: tuple(pts[i]))
        for m in interior:
            if m != apex:
                edges.add((apex, m) if apex < m else (m, apex))
        anchor = min(cycle, key=lambda i: tuple(pts[i]))
        edges.add((apex, anchor) if apex < anchor else (anchor, apex))
    return sorted(edges)


def apply_rigid(motion: RigidMotion, cloud: PointCloud) -> PointCloud:
    """Map every point through the motion; features unchanged."""
    return PointCloud(motion.apply(cloud.coords), cloud.features)


@dataclass(frozen=True)
class Frame:
    """Local frame: orthogonal orientation matrix plus geometric center.

    The orientation may have determinant -1; mirror-image clouds get
    mirror-image frames, which keeps frame products pose-invariant under
    reflections as well as rotations.

    `oriented` is True only when every axis ordering and sign was strictly
    resolved by the cloud itself, i.e. the orientation transforms
    equivariantly under rigid motions. Symmetric clouds (a single point, two
    points, planar triangles, ...) fall back to a fixed convention and are
    flagged unoriented; consumers must not treat their orientation as pose
    information.
    """

    rotation: np.ndarray
    center: np.ndarray
    oriented: bool = True

    def __post_init__(self):
        r = np.asarray(self.rotation, dtype=float).reshape(3, 3)
        c = as_vec3(self.center)
        if np.max(np.abs(r.T @ r - np.eye(3))) > 1e-6:
            raise ValueError("frame orientation is not orthogonal")
        r.setflags(write=False)
        c.setflags(write=False)
        object.__setattr__(self, "rotation", r)
        object.__setattr__(self, "center", c)


def _projection_key(x: np.ndarray, axis: np.ndarray) -> tuple:
    proj = np.sort(np.rint((x @ axis) * _LEX_SCALE).astype(np.int64))
    return tuple(proj.tolist())


def _fix_sign(x: np.ndarray, axis: np.ndarray) -> tuple[np.ndarray, bool]:
    """Orient an axis by the third central moment; lexicographic fallback.

    Returns the oriented axis and whether the choice was data-resolved (the
    moment was clearly nonzero, or the quantized projection multisets of the
    two directions differ). Unresolved ties keep the axis as-is.
    """
    m3 = float(np.sum((x @ axis) ** 3))
    if abs(m3) >= _MOMENT_TOL:
        return (axis if m3 > 0 else -axis), True
    kp = _projection_key(x, axis)
    km = _projection_key(x, -axis)
    if kp == km:
        return axis, False
    return (axis if kp > km else -axis), True


def compute_frame(cloud: PointCloud) -> Frame:
    """Equivariant frame for a point cloud.

    Axes are the eigenvectors of the centered covariance, ordered by
    descending eigenvalue, each sign fixed by the third central moment along
    the axis, with a deterministic lexicographic rule on quantized
    projections as the tie-breaker. On generic clouds every decision is
    data-resolved and the construction satisfies
    frame(g . P) = g . frame(P) for every rigid motion g; clouds with a
    degenerate spectrum or an unresolved sign come back flagged unoriented
    (their orientation is a fixed convention, not pose information).
    """
    c = centroid(cloud)
    if len(cloud) == 1:
        return Frame(np.eye(3), c, oriented=False)
    x = cloud.coords - c
    cov = x.T @ x / len(cloud)
    evals, evecs = np.linalg.eigh(cov)
    order = np.argsort(-evals, kind="stable")
    evals = evals[order]
    axes = [evecs[:, i] for i in order]
    # Near-equal eigenvalues leave eigh free to mix the eigenspace, so the
    # axes themselves are convention, not data.
    oriented = bool(evals[0] - evals[1] >= _EIGENGAP_TOL
                    and evals[1] - evals[2] >= _EIGENGAP_TOL)
    fixed = []
    for v in axes:
        fv, resolved = _fix_sign(x, v)
        oriented = oriented and resolved
        fixed.append(fv)
    return Frame(np.column_stack(fixed), c, oriented=oriented)


def _pairwise_distances(coords: np.ndarray) -> np.ndarray:
    diff = coords[:, None, :] - coords[None, :, :]
    d = np.linalg.norm(diff, axis=-1)
    iu = np.triu_indices(len(coords), k=1)
    return d[iu]


def _aligns(p: np.ndarray, q: np.ndarray, tol: float) -> bool:
    """Best orthogonal superposition (reflection allowed) of ordered points."""
    pc = p - p.mean(axis=0)
    qc = q - q.mean(axis=0)
    u, _, vt = np.linalg.svd(qc.T @ pc)
    r = u @ vt
    return float(np.max(np.linalg.norm(pc @ r.T - qc, axis=1))) <= tol


def congruent(cloud_a: PointCloud, cloud_b: PointCloud, tol: float) -> bool:
    """Brute-force congruence test for attributed point clouds.

    True iff some feature-preserving bijection plus rigid motion (rotation,
    reflection, translation) matches the clouds within `tol`. Candidate
    correspondences come from sorted pairwise-distance signatures; clouds of
    at most 8 points get an exact permutation search. Ties in the signatures
    are resolved by bounded permutation search, so the test is exact for
    generic inputs.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    a, b = cloud_a.coords, cloud_b.coords
    fa, fb = cloud_a.features, cloud_b.features
    n = len(a)
    if len(b) != n:
        return False
    if sorted(fa.tolist()) != sorted(fb.tolist()):
        return False
    if n == 1:
        return True
    da = np.sort(_pairwise_distances(a))
    db = np.sort(_pairwise_distances(b))
    if float(np.max(np.abs(da - db))) > tol:
        return False

    if n <= 8:
        for perm in itertools.permutations(range(n)):
            if not np.array_equal(fa, fb[list(perm)]):
                continue
            if _aligns(a, b[list(perm)], tol):
                return True
        return False

    dist_a = np.sort(np.linalg.norm(a[:, None] - a[None, :], axis=-1), axis=1)
    dist_b = np.sort(np.linalg.norm(b[:, None] - b[None, :], axis=-1), axis=1)
    order_a = sorted(range(n), key=lambda i: (int(fa[i]),) + tuple(dist_a[i]))
    order_b = sorted(range(n), key=lambda j: (int(fb[j]),) + tuple(dist_b[j]))

    # Group signature ties so noise-level reorderings cannot break the match.
    def same_sig(i, j):
        return fa[i] == fb[j] and float(np.max(np.abs(dist_a[i] - dist_b[j]))) <= tol

    groups_a, groups_b = [], []
    k = 0
    while k < n:
        ga = [order_a[k]]
        gb = [order_b[k]]
        k += 1
        while k < n and same_sig(ga[0], order_b[k]) and same_sig(order_a[k], gb[0]):
            ga.append(order_a[k])
            gb.append(order_b[k])
            k += 1
        if not same_sig(ga[0], gb[0]):
            return False
        groups_a.append(ga)
        groups_b.append(gb)

    total = 1
    for g in groups_a:
        for m in range(2, len(g) + 1):
            total *= m
        if total > _MAX_TIE_COMBOS:
            return False
    for combo in itertools.product(*(itertools.permutations(g) for g in groups_b)):
        perm = [j for g in combo for j in g]
        src = [i for g in groups_a for i in g]
        full = np.empty(n, dtype=int)
        full[src] = perm
        if np.array_equal(fa, fb[full]) and _aligns(a, b[full], tol):
            return True
    return False
