"""Assembly of the full two-level graph for a protein chain: one sparse hull
graph per secondary-structure segment (over CA coordinates), plus one hull
graph over segment centers whose edges carry relative-orientation matrices
between segment frames.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .dssp import Segment, SSToken, TOKEN_INDEX, assign_tokens, segment as segment_tokens
from .geometry import Frame, PointCloud, compute_frame
from .pdbio import ProteinChain, estimate_hydrogens, peptide_breaks
from .schull import GeometricGraph, build_schull

# Amino-acid code table used for integer node features; unknown types map to UNK.
AA_CODES = ("ALA", "ARG", "ASN", "ASP", "CYS", "GLN", "GLU", "GLY", "HIS",
            "ILE", "LEU", "LYS", "MET", "PHE", "PRO", "SER", "THR", "TRP",
            "TYR", "VAL", "UNK")
AA_INDEX = {aa: k for k, aa in enumerate(AA_CODES)}


def aa_code(aa_type: str) -> int:
    return AA_INDEX.get(aa_type, AA_INDEX["UNK"])


def residue_feature(aa_type: str, token: SSToken) -> int:
    """Pack (amino-acid code, token) into one integer; token index < 16."""
    return aa_code(aa_type) * 16 + TOKEN_INDEX[token]


def unit_feature(token: SSToken, size: int) -> int:
    """Pack (segment size, token) into one integer."""
    return size * 16 + TOKEN_INDEX[token]


@dataclass(frozen=True)
class IntraGraph:
    """Hull graph over the CA coordinates of one segment, with its local frame."""

    segment: Segment
    graph: GeometricGraph
    frame: Frame


@dataclass(frozen=True)
class InterEdgeFeature:
    """Relative orientation between two segment frames plus the edge geometry."""

    rel_orientation: np.ndarray
    length: float
    tau: float

    def __post_init__(self):
        r = np.asarray(self.rel_orientation, dtype=float).reshape(3, 3)
        if np.max(np.abs(r.T @ r - np.eye(3))) > 1e-6:
            raise ValueError("relative orientation is not orthogonal")
        r.setflags(write=False)
        object.__setattr__(self, "rel_orientation", r)


@dataclass(frozen=True)
class HierarchicalGraph:
    source_id: str
    residue_count: int
    aa_names: tuple
    tokens: tuple
    intra: tuple
    inter: GeometricGraph
    inter_features: tuple

    @property
    def segments(self) -> list[Segment]:
        return [ig.segment for ig in self.intra]


class EdgeAudit(NamedTuple):
    inter: int
    intra_sum: int
    bound_ok: bool


class BuildError(RuntimeError):
    """Wraps an upstream failure with the pipeline stage where it occurred."""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"{stage}: {cause}")
        self.stage = stage
        self.cause = cause


def build_intra(chain: ProteinChain, segments: list[Segment],
                jitter: bool = False) -> list[IntraGraph]:
    """One hull graph per segment over its CA coordinates.

    Node features pack (amino-acid type, token); the frame is computed from
    the same coordinates as the graph.
    """
    expected = 0
    for seg in segments:
        if seg.start != expected:
            raise ValueError("segments do not tile the chain")
        expected = seg.end + 1
    if expected != len(chain):
        raise ValueError("segments do not cover the chain")
    out = []
    for idx, seg in enumerate(segments):
        coords = np.array([chain.residues[k].ca for k in seg.indices])
        feats = [residue_feature(chain.residues[k].aa_type, seg.token)
                 for k in seg.indices]
        cloud = PointCloud(coords, feats)
        try:
            graph = build_schull(cloud, jitter=jitter)
        except ValueError as exc:
            raise type(exc)(f"segment {idx} [{seg.start}..{seg.end}]: {exc}") from exc
        out.append(IntraGraph(segment=seg, graph=graph, frame=compute_frame(cloud)))
    return out


def build_inter(intra: list[IntraGraph],
                jitter: bool = False) -> tuple[GeometricGraph, tuple]:
    """Hull graph over segment geometric centers.

    Each edge (i, j) carries (length, tau, frame_i^T frame_j); node features
    pack (token, segment size).
    """
    if not intra:
        raise ValueError("need at least one intra graph")
    centers = np.array([ig.frame.center for ig in intra])
    feats = [unit_feature(ig.segment.token, len(ig.segment)) for ig in intra]
    cloud = PointCloud(centers, feats)
    graph = build_schull(cloud, jitter=jitter)
    features = []
    for i, j, length, tau in graph.edge_records():
        # Unoriented frames carry convention, not pose; their product would
        # break rigid-motion invariance, so such edges record the identity.
        if intra[i].frame.oriented and intra[j].frame.oriented:
            rel = intra[i].frame.rotation.T @ intra[j].frame.rotation
        else:
            rel = np.eye(3)
        features.append(InterEdgeFeature(rel_orientation=rel, length=length, tau=tau))
    return graph, tuple(features)


def build_hierarchy(chain: ProteinChain,
                    tokens: list[SSToken] | None = None,
                    jitter: bool = False) -> HierarchicalGraph:
    """Full pipeline: tokens -> segments -> intra graphs -> inter graph.

    When `tokens` is omitted they are assigned from hydrogen-bond patterns
    (hydrogens are estimated on the fly). Passing tokens explicitly skips
    that stage, which is how synthetic segmentations are driven in tests.
    """
    breaks = peptide_breaks(chain)
    if tokens is None:
        try:
            tokens = assign_tokens(estimate_hydrogens(chain))
        except Exception as exc:
            raise BuildError("token assignment", exc) from exc
    if len(tokens) != len(chain):
        raise ValueError("token list length does not match chain length")
    segments = segment_tokens(list(tokens), breaks)
    try:
        intra = build_intra(chain, segments, jitter=jitter)
    except ValueError as exc:
        raise BuildError("intra graphs", exc) from exc
    try:
        inter, inter_feats = build_inter(intra, jitter=jitter)
    except ValueError as exc:
        raise BuildError("inter graph", exc) from exc
    return HierarchicalGraph(
        source_id=chain.source_id,
        residue_count=len(chain),
        aa_names=tuple(r.aa_type for r in chain.residues),
        tokens=tuple(tokens),
        intra=tuple(intra),
        inter=inter,
        inter_features=inter_feats,
    )


def total_edges(h: HierarchicalGraph) -> EdgeAudit:
    """Edge counts and the strict sparsity bound inter + intra_sum < 3N."""
    intra_sum = sum(ig.graph.n_edges for ig in h.intra)
    inter = h.inter.n_edges
    return EdgeAudit(inter=inter, intra_sum=intra_sum,
                     bound_ok=inter + intra_sum < 3 * h.residue_count)
