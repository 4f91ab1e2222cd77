"""Sparse connected geometric graphs over point clouds.

`build_schull` implements the sphere-projection convex-hull construction
(SCHull): project points onto the unit sphere about their centroid, take the
hull edges of the projection, and attach rigid-motion-invariant attributes.
`radius_graph` is the conventional distance-cutoff baseline with the same
attribute schema.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.spatial import cKDTree

from .geometry import (
    COINCIDENT_TOL,
    DegeneratePoint,
    PointCloud,
    convex_hull_sphere,
    unit_directions,
)

JITTER_SCALE = 1e-7


class DuplicateDirection(ValueError):
    """Two points project to the same location on the unit sphere."""


@dataclass(frozen=True)
class GeometricGraph:
    """Nodes with centroid-distance attributes and undirected attributed edges.

    Edges are stored once as (i, j) with i < j, sorted lexicographically;
    `lengths` holds ||x_i - x_j|| and `taus` the centroid angle between the
    projected endpoints (0 for radius graphs).
    """

    node_coords: np.ndarray
    node_attrs: np.ndarray
    node_features: np.ndarray
    edges: np.ndarray
    lengths: np.ndarray
    taus: np.ndarray
    centroid: np.ndarray

    def __post_init__(self):
        for name in ("node_coords", "node_attrs", "node_features",
                     "edges", "lengths", "taus", "centroid"):
            arr = np.asarray(getattr(self, name))
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def n_nodes(self) -> int:
        return len(self.node_coords)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def edge_records(self):
        """Yield (i, j, length, tau) per edge."""
        for k in range(self.n_edges):
            i, j = self.edges[k]
            yield int(i), int(j), float(self.lengths[k]), float(self.taus[k])


def is_connected(n_nodes: int, edges) -> bool:
    """Union-find connectivity check on an undirected edge list."""
    parent = list(range(n_nodes))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    components = n_nodes
    for i, j in edges:
        ri, rj = find(int(i)), find(int(j))
        if ri != rj:
            parent[ri] = rj
            components -= 1
    return components <= 1


def _jittered(coords: np.ndarray) -> np.ndarray:
    """Deterministic per-index perturbation of JITTER_SCALE Angstrom."""
    out = np.array(coords, dtype=float)
    for i in range(len(out)):
        v = np.random.default_rng(i).standard_normal(3)
        out[i] += JITTER_SCALE * v / np.linalg.norm(v)
    return out


def _assemble(coords, features, edge_list, dirs, center):
    center = np.asarray(center, dtype=float)
    attrs = np.linalg.norm(coords - center, axis=1)
    if edge_list:
        edges = np.array(sorted(edge_list), dtype=np.int64)
        diffs = coords[edges[:, 0]] - coords[edges[:, 1]]
        lengths = np.linalg.norm(diffs, axis=1)
        if dirs is None:
            taus = np.zeros(len(edges))
        else:
            dots = np.einsum("ij,ij->i", dirs[edges[:, 0]], dirs[edges[:, 1]])
            taus = np.arccos(np.clip(dots, -1.0, 1.0))
    else:
        edges = np.zeros((0, 2), dtype=np.int64)
        lengths = np.zeros(0)
        taus = np.zeros(0)
    return GeometricGraph(
        node_coords=np.array(coords, dtype=float),
        node_attrs=attrs,
        node_features=np.asarray(features, dtype=np.int64),
        edges=edges,
        lengths=lengths,
        taus=taus,
        centroid=center,
    )


def _build_hull_graph(coords: np.ndarray, features: np.ndarray) -> GeometricGraph:
    n = len(coords)
    center = coords.mean(axis=0)
    if n == 1:
        return _assemble(coords, features, [], None, center)
    if n == 2:
        # Projections of two points about their midpoint are exactly antipodal.
        graph = _assemble(coords, features, [(0, 1)], None, center)
        return replace(graph, taus=np.array([np.pi]))
    dirs = unit_directions(coords, center)
    if cKDTree(dirs).query_pairs(COINCIDENT_TOL):
        raise DuplicateDirection("two points project to the same sphere location")
    edge_list = convex_hull_sphere(dirs)
    return _assemble(coords, features, edge_list, dirs, center)


def build_schull(cloud: PointCloud, jitter: bool = False) -> GeometricGraph:
    """Sphere-projection convex-hull graph of an attributed point cloud.

    Node attribute: distance to the cloud centroid. Edge attributes: the
    Euclidean edge length and tau, the angle subtended at the centroid by
    the two projected endpoints. All attributes are rigid-motion invariant,
    the graph is connected for n >= 2, and the edge count is at most 3n - 6
    for n >= 3 (1 for n = 2, 0 for n = 1).

    Degenerate inputs (a point on the centroid, or two points projecting to
    the same direction) raise unless `jitter` is set, in which case a
    deterministic 1e-7 A perturbation seeded by point index is applied and
    the build retried.
    """
    try:
        return _build_hull_graph(cloud.coords, cloud.features)
    except (DegeneratePoint, DuplicateDirection):
        if not jitter:
            raise
        return _build_hull_graph(_jittered(cloud.coords), cloud.features)


def radius_graph(cloud: PointCloud, cutoff: float) -> GeometricGraph:
    """Distance-cutoff graph: an edge for every pair with ||x_i - x_j|| <= cutoff.

    Same attribute schema as `build_schull` with tau fixed to 0; exists for
    edge-count comparisons only and may be disconnected.
    """
    if cutoff <= 0:
        raise ValueError("cutoff must be positive")
    coords = cloud.coords
    pairs = cKDTree(coords).query_pairs(cutoff)
    edge_list = [(min(i, j), max(i, j)) for i, j in pairs]
    return _assemble(coords, cloud.features, edge_list, None, coords.mean(axis=0))
