"""Shared test utilities: fixture chains, congruence-oracle wrappers, and
independent mini-oracles used to validate derived expected values."""
from __future__ import annotations

import numpy as np

from sshg import synth
from sshg.dssp import TOKEN_INDEX, SSToken
from sshg.geometry import PointCloud, congruent
from sshg.hierarchy import aa_code
from sshg.pdbio import ProteinChain, estimate_hydrogens


def hydrogenated(chain: ProteinChain) -> ProteinChain:
    return estimate_hydrogens(chain)


def helix(n=12, wiggle=0.0, source_id="helix"):
    return hydrogenated(synth.ideal_helix(n, source_id, wiggle=wiggle))


def hairpin():
    return hydrogenated(synth.beta_hairpin())


def kink():
    return hydrogenated(synth.kinked_trace())


def bundle():
    return hydrogenated(synth.helix_bundle())


def sheets():
    return hydrogenated(synth.sheet_stack())


def random_chain(seed: int, n: int) -> ProteinChain:
    return hydrogenated(synth.random_chain(np.random.default_rng(seed), n,
                                           source_id=f"random{seed}"))


def random_tokens(seed: int, n: int):
    return synth.random_tokens(np.random.default_rng(seed), n)


def chain_cloud(chain: ProteinChain, tokens) -> PointCloud:
    """CA point cloud with features packing (sequence position, residue type,
    token), the identity class the fingerprint promises to respect."""
    feats = [
        k * 1024 + aa_code(chain.residues[k].aa_type) * 16 + TOKEN_INDEX[tokens[k]]
        for k in range(len(chain))
    ]
    return PointCloud(chain.ca_coords(), feats)


def chains_congruent(chain_a, tokens_a, chain_b, tokens_b, tol=1e-6) -> bool:
    if len(chain_a) != len(chain_b):
        return False
    return congruent(chain_cloud(chain_a, tokens_a),
                     chain_cloud(chain_b, tokens_b), tol)


def oracle_hbond_energy(o, c, n, h) -> float:
    """Independent evaluation of the electrostatic bond model from raw atom
    positions; deliberately not reusing the package implementation."""
    dist = lambda a, b: float(np.sqrt(sum((x - y) ** 2 for x, y in zip(a, b))))
    return 0.084 * 332.0 * (1.0 / dist(o, n) + 1.0 / dist(c, h)
                            - 1.0 / dist(o, h) - 1.0 / dist(c, n))


def oracle_all_bonds(chain: ProteinChain, threshold=-0.5):
    """Brute-force H-bond enumeration straight from the formula (no prefilter,
    no shared code path with dssp.detect_hbonds)."""
    found = set()
    res = chain.residues
    for i in range(len(res)):
        for j in range(len(res)):
            if abs(i - j) < 2 or res[j].h is None:
                continue
            e = oracle_hbond_energy(res[i].o, res[i].c, res[j].n, res[j].h)
            if e < threshold:
                found.add((i, j))
    return found


def oracle_chord_angle_deg(ca: np.ndarray, i: int) -> float:
    u = ca[i] - ca[i - 2]
    v = ca[i + 2] - ca[i]
    cosang = np.dot(u, v) / (np.linalg.norm(u) * np.linalg.norm(v))
    return float(np.degrees(np.arccos(np.clip(cosang, -1.0, 1.0))))


def token_objects(letters: str):
    return [SSToken.from_letter(ch) for ch in letters]
