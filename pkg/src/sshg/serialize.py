"""JSON interchange schema for hierarchical graphs.

Layout (all reals serialized with 9 significant digits):

    meta      source_id, tool_version, hash_seed, quantization_scale, jitter
    segments  [{start, end, token}]
    intra     per segment: nodes [global index, aa, [x,y,z], node_attr],
              edges [i, j, length, tau] with graph-local node indices
    inter     nodes [[cx,cy,cz], token, size],
              edges [i, j, length, tau, [9 reals, row-major orientation]]
    audit     N, I, inter_edges, intra_edges_sum, bound_ok

Edges on units whose frames are not data-orientable carry the identity as
their orientation block (see geometry.Frame.oriented). `read_hierarchy`
reconstructs a HierarchicalGraph from a document; stored attributes are
trusted as-is and frames are recomputed from the serialized coordinates.
"""
from __future__ import annotations

import json

import numpy as np

from . import __version__
from .dssp import Segment, SSToken
from .geometry import PointCloud, compute_frame
from .hierarchy import (
    HierarchicalGraph,
    InterEdgeFeature,
    IntraGraph,
    residue_feature,
    total_edges,
    unit_feature,
)
from .schull import GeometricGraph
from .wlref import HASH_SEED, QuantConfig


def round_sig(x: float) -> float:
    """Round to 9 significant decimal digits."""
    return float(f"{float(x):.9g}")


def hierarchy_to_doc(h: HierarchicalGraph, jitter: bool = False,
                     cfg: QuantConfig | None = None) -> dict:
    cfg = cfg or QuantConfig()
    doc = {
        "meta": {
            "source_id": h.source_id,
            "tool_version": __version__,
            "hash_seed": HASH_SEED.decode("ascii"),
            "quantization_scale": round_sig(cfg.scale),
            "jitter": bool(jitter),
        },
        "segments": [
            {"start": s.start, "end": s.end, "token": s.token.letter}
            for s in h.segments
        ],
        "intra": [],
        "inter": {"nodes": [], "edges": []},
        "audit": {},
    }
    for ig in h.intra:
        g = ig.graph
        nodes = []
        for local, k in enumerate(ig.segment.indices):
            nodes.append([
                k,
                h.aa_names[k],
                [round_sig(v) for v in g.node_coords[local]],
                round_sig(g.node_attrs[local]),
            ])
        edges = [[i, j, round_sig(length), round_sig(tau)]
                 for i, j, length, tau in g.edge_records()]
        doc["intra"].append({"nodes": nodes, "edges": edges})
    g = h.inter
    for i, ig in enumerate(h.intra):
        doc["inter"]["nodes"].append([
            [round_sig(v) for v in g.node_coords[i]],
            ig.segment.token.letter,
            len(ig.segment),
        ])
    for k, (i, j, length, tau) in enumerate(g.edge_records()):
        rel = h.inter_features[k].rel_orientation.flatten(order="C")
        doc["inter"]["edges"].append([
            i, j, round_sig(length), round_sig(tau),
            [round_sig(v) for v in rel],
        ])
    audit = total_edges(h)
    doc["audit"] = {
        "N": h.residue_count,
        "I": len(h.intra),
        "inter_edges": audit.inter,
        "intra_edges_sum": audit.intra_sum,
        "bound_ok": audit.bound_ok,
    }
    return doc


def doc_to_json(doc: dict) -> str:
    return json.dumps(doc, indent=2) + "\n"


def hierarchy_to_json(h: HierarchicalGraph, jitter: bool = False,
                      cfg: QuantConfig | None = None) -> str:
    return doc_to_json(hierarchy_to_doc(h, jitter=jitter, cfg=cfg))


def _graph_from_parts(coords, attrs, features, edge_rows, centroid):
    coords = np.asarray(coords, dtype=float).reshape(-1, 3)
    if edge_rows:
        edges = np.array([[r[0], r[1]] for r in edge_rows], dtype=np.int64)
        lengths = np.array([r[2] for r in edge_rows], dtype=float)
        taus = np.array([r[3] for r in edge_rows], dtype=float)
    else:
        edges = np.zeros((0, 2), dtype=np.int64)
        lengths = np.zeros(0)
        taus = np.zeros(0)
    return GeometricGraph(
        node_coords=coords,
        node_attrs=np.asarray(attrs, dtype=float),
        node_features=np.asarray(features, dtype=np.int64),
        edges=edges,
        lengths=lengths,
        taus=taus,
        centroid=np.asarray(centroid, dtype=float),
    )


def read_hierarchy(doc: dict | str) -> HierarchicalGraph:
    """Reconstruct a HierarchicalGraph from a serialized document."""
    if isinstance(doc, str):
        doc = json.loads(doc)
    segments = [Segment(s["start"], s["end"], SSToken.from_letter(s["token"]))
                for s in doc["segments"]]
    n_residues = doc["audit"]["N"]
    aa_names = [None] * n_residues
    intra = []
    for seg, block in zip(segments, doc["intra"]):
        coords, attrs, feats = [], [], []
        for k, aa, xyz, attr in block["nodes"]:
            aa_names[k] = aa
            coords.append(xyz)
            attrs.append(attr)
            feats.append(residue_feature(aa, seg.token))
        centroid = np.asarray(coords, dtype=float).mean(axis=0)
        graph = _graph_from_parts(coords, attrs, feats, block["edges"], centroid)
        cloud = PointCloud(graph.node_coords, feats)
        intra.append(IntraGraph(segment=seg, graph=graph, frame=compute_frame(cloud)))
    centers, tokens_sizes = [], []
    for center, letter, size in doc["inter"]["nodes"]:
        centers.append(center)
        tokens_sizes.append(unit_feature(SSToken.from_letter(letter), size))
    inter_centroid = np.asarray(centers, dtype=float).mean(axis=0)
    inter_attrs = [np.linalg.norm(np.asarray(c) - inter_centroid) for c in centers]
    # Node attributes of the segment graph are recomputed from the serialized
    # centers; edge attributes are trusted as stored.
    inter = _graph_from_parts(centers, inter_attrs, tokens_sizes,
                              [e[:4] for e in doc["inter"]["edges"]], inter_centroid)
    feats = tuple(
        InterEdgeFeature(
            rel_orientation=np.asarray(e[4], dtype=float).reshape(3, 3),
            length=float(e[2]),
            tau=float(e[3]),
        )
        for e in doc["inter"]["edges"]
    )
    tokens = []
    for seg in segments:
        tokens.extend([seg.token] * len(seg))
    return HierarchicalGraph(
        source_id=doc["meta"]["source_id"],
        residue_count=n_residues,
        aa_names=tuple(aa_names),
        tokens=tuple(tokens),
        intra=tuple(intra),
        inter=inter,
        inter_features=feats,
    )


def invariant_view(doc: dict) -> dict:
    """The pose-invariant projection of a document: everything except node
    coordinates and segment centers. Two builds of the same structure under
    different rigid motions must agree on this view."""
    return {
        "segments": doc["segments"],
        "intra": [
            {
                "nodes": [[k, aa, attr] for k, aa, _, attr in block["nodes"]],
                "edges": block["edges"],
            }
            for block in doc["intra"]
        ],
        "inter": {
            "nodes": [[letter, size] for _, letter, size in doc["inter"]["nodes"]],
            "edges": doc["inter"]["edges"],
        },
        "audit": doc["audit"],
    }


def compare_invariant(doc_a: dict, doc_b: dict, tol: float = 1e-6) -> list[str]:
    """Mismatches between the invariant views of two documents, as readable
    strings; empty when they agree within `tol` on every scalar."""
    problems = []

    def walk(a, b, path):
        if isinstance(a, dict) and isinstance(b, dict):
            if a.keys() != b.keys():
                problems.append(f"{path}: key sets differ")
                return
            for k in a:
                walk(a[k], b[k], f"{path}.{k}")
        elif isinstance(a, list) and isinstance(b, list):
            if len(a) != len(b):
                problems.append(f"{path}: length {len(a)} != {len(b)}")
                return
            for i, (x, y) in enumerate(zip(a, b)):
                walk(x, y, f"{path}[{i}]")
        elif isinstance(a, bool) or isinstance(b, bool) or \
                isinstance(a, str) or isinstance(b, str):
            if a != b:
                problems.append(f"{path}: {a!r} != {b!r}")
        elif isinstance(a, (int, float)) and isinstance(b, (int, float)):
            if abs(float(a) - float(b)) > tol:
                problems.append(f"{path}: {a} != {b} (tol {tol})")
        elif a != b:
            problems.append(f"{path}: {a!r} != {b!r}")

    walk(invariant_view(doc_a), invariant_view(doc_b), "$")
    return problems
