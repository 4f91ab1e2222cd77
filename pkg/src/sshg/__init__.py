"""Secondary-structure hierarchical graphs for protein backbones.

Build sparse, connected, pose-invariant graph representations from PDB
backbone coordinates: per-residue secondary-structure tokens, one hull graph
per structural segment, a segment-level graph with relative-orientation edge
features, and a deterministic 128-bit fingerprint over the whole hierarchy.
"""

__version__ = "0.1.0"

from .dssp import (
    HBond,
    Segment,
    SSToken,
    assign_tokens,
    detect_bridges,
    detect_hbonds,
    detect_structures,
    detect_turns,
    hbond_energy,
    segment,
    token_string,
)
from .geometry import (
    DegenerateConfiguration,
    DegeneratePoint,
    Frame,
    PointCloud,
    RigidMotion,
    apply_rigid,
    centroid,
    compute_frame,
    congruent,
    convex_hull_sphere,
    project_to_sphere,
    random_rigid_motion,
)
from .hierarchy import (
    HierarchicalGraph,
    InterEdgeFeature,
    IntraGraph,
    build_hierarchy,
    build_inter,
    build_intra,
    total_edges,
)
from .pdbio import (
    EmptyStructure,
    MalformedRecord,
    ParsedStructure,
    ProteinChain,
    Residue,
    estimate_hydrogens,
    parse_pdb,
    peptide_breaks,
    to_pdb,
    transform_chain,
)
from .schull import DuplicateDirection, GeometricGraph, build_schull, is_connected, radius_graph
from .wlref import Fingerprint, QuantConfig, distinguish, fingerprint, intra_code, quantize
