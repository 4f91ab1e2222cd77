"""Deterministic synthetic backbone generators used by the test suite and
for demos: an ideal helix built from standard internal coordinates, a
hand-placed antiparallel hairpin, a kinked trace for bend detection, packed
multi-piece structures for edge-count comparisons, and seeded random chains.

All generators return full N/CA/C/O backbones. Coordinates carry small
aperiodic wiggles where needed so segment point clouds stay generic (no
collinear or coplanar degeneracies).
"""
from __future__ import annotations

import numpy as np

from .pdbio import ProteinChain, Residue

# Standard backbone internal coordinates (lengths in Angstrom, angles in deg).
BOND_N_CA = 1.458
BOND_CA_C = 1.525
BOND_C_N = 1.329
BOND_C_O = 1.231
ANGLE_N_CA_C = 111.2
ANGLE_CA_C_N = 116.2
ANGLE_C_N_CA = 121.7
ANGLE_CA_C_O = 120.8

HELIX_PHI = -57.0
HELIX_PSI = -47.0

# Residue types cycled through generated chains; proline excluded so every
# residue past the first can donate an H-bond.
_AA_CYCLE = ("ALA", "LEU", "GLU", "LYS", "VAL", "SER", "ASP", "PHE",
             "GLY", "THR", "ARG", "ILE")


def _place_atom(a, b, c, bond_length, bond_angle_deg, dihedral_deg):
    """Position a fourth atom from three predecessors by internal coordinates."""
    angle = np.radians(bond_angle_deg)
    dihedral = np.radians(dihedral_deg)
    bc = c - b
    bc /= np.linalg.norm(bc)
    ab = b - a
    n = np.cross(ab, bc)
    n /= np.linalg.norm(n)
    m = np.cross(n, bc)
    d = np.array([
        -bond_length * np.cos(angle),
        bond_length * np.sin(angle) * np.cos(dihedral),
        bond_length * np.sin(angle) * np.sin(dihedral),
    ])
    return c + d[0] * bc + d[1] * m + d[2] * n


def backbone_from_dihedrals(phis, psis, omegas=None) -> list[dict]:
    """Build backbone atoms from (phi, psi, omega) torsion schedules.

    phis[0] is unused (no preceding carbonyl); psis and omegas for the last
    residue fix its carbonyl orientation. Returns one dict of atom arrays per
    residue.
    """
    n_res = len(phis)
    if omegas is None:
        omegas = [180.0] * n_res
    atoms = []
    # Seed the first residue explicitly.
    n0 = np.array([0.0, 0.0, 0.0])
    ca0 = np.array([BOND_N_CA, 0.0, 0.0])
    angle = np.radians(ANGLE_N_CA_C)
    c0 = ca0 + BOND_CA_C * np.array([-np.cos(angle), np.sin(angle), 0.0])
    atoms.append({"N": n0, "CA": ca0, "C": c0})
    for i in range(1, n_res):
        prev = atoms[-1]
        n_i = _place_atom(prev["N"], prev["CA"], prev["C"],
                          BOND_C_N, ANGLE_CA_C_N, psis[i - 1])
        ca_i = _place_atom(prev["CA"], prev["C"], n_i,
                           BOND_N_CA, ANGLE_C_N_CA, omegas[i - 1])
        c_i = _place_atom(prev["C"], n_i, ca_i,
                          BOND_CA_C, ANGLE_N_CA_C, phis[i])
        atoms.append({"N": n_i, "CA": ca_i, "C": c_i})
    # Carbonyl oxygens: in the peptide plane, trans to the next amide N.
    for i, res in enumerate(atoms):
        if i + 1 < n_res:
            res["O"] = _place_atom(atoms[i + 1]["N"], res["CA"], res["C"],
                                   BOND_C_O, ANGLE_CA_C_O, 180.0)
        else:
            res["O"] = _place_atom(res["N"], res["CA"], res["C"],
                                   BOND_C_O, ANGLE_CA_C_O, psis[i] + 180.0)
    return atoms


def _chain_from_atoms(atom_dicts, source_id, chain_id="A", aa_types=None) -> ProteinChain:
    residues = []
    for k, rec in enumerate(atom_dicts):
        aa = aa_types[k] if aa_types else _AA_CYCLE[k % len(_AA_CYCLE)]
        residues.append(Residue(seq_index=k, chain_id=chain_id, aa_type=aa,
                                n=rec["N"], ca=rec["CA"], c=rec["C"], o=rec["O"]))
    return ProteinChain(tuple(residues), source_id=source_id)


def ideal_helix(n_residues: int, source_id: str = "helix",
                wiggle: float = 0.0) -> ProteinChain:
    """Alpha-helical backbone from textbook torsions (phi -57, psi -47).

    Interior residues form the i -> i+4 hydrogen-bond ladder; rise is close
    to 1.5 A per residue with roughly 3.6 residues per turn. A nonzero
    `wiggle` shifts each residue rigidly by a small aperiodic offset, which
    breaks the exact screw symmetry (making segment frames data-orientable)
    without disturbing the bond pattern.
    """
    phis = [HELIX_PHI] * n_residues
    psis = [HELIX_PSI] * n_residues
    atoms = backbone_from_dihedrals(phis, psis)
    if wiggle:
        atoms = [{k: v + _wiggle(i, wiggle) for k, v in rec.items()}
                 for i, rec in enumerate(atoms)]
    return _chain_from_atoms(atoms, source_id)


def _wiggle(k: int, amplitude: float = 0.05) -> np.ndarray:
    """Small deterministic aperiodic offset; keeps point clouds generic."""
    t = float(k)
    return amplitude * np.array([np.sin(1.7 * t + 0.3),
                                 np.sin(2.3 * t + 1.1),
                                 np.sin(2.9 * t + 2.2)])


# Hairpin layout constants: strand spacing chosen so that paired residues
# form O...H-N contacts near 1.9 A.
_STRAND_STEP = 3.4
_STRAND_SEP = 4.13
_PLEAT = 0.4

# Residues expected to carry strand tokens in `beta_hairpin` output.
HAIRPIN_STRANDS = (tuple(range(1, 5)), tuple(range(8, 12)))


def beta_hairpin(source_id: str = "hairpin") -> ProteinChain:
    """Two 5-residue antiparallel strands joined by a 3-residue loop.

    Atom placement is explicit: carbonyls on the bonding side of each strand
    point across the gap, producing reciprocal H-bonds at the pairs (0,12),
    (2,10), (4,8) and with them the antiparallel ladder that marks the
    interior strand residues E (see HAIRPIN_STRANDS).
    """
    records = []

    def add_residue(ca, tangent, o_dir):
        tangent = tangent / np.linalg.norm(tangent)
        o_dir = o_dir / np.linalg.norm(o_dir)
        n = ca - 1.0 * tangent
        c = ca + 1.0 * tangent
        records.append({"N": n, "CA": ca, "C": c, "O": c + BOND_C_O * o_dir})

    plus_y = np.array([0.0, 1.0, 0.0])
    minus_y = -plus_y
    plus_x = np.array([1.0, 0.0, 0.0])

    # Strand A along +x at y=0; even residues bond toward +y.
    for k in range(5):
        ca = np.array([k * _STRAND_STEP, 0.0, _PLEAT * (-1.0) ** k]) + _wiggle(k)
        add_residue(ca, plus_x, plus_y if k % 2 == 0 else minus_y)

    # Loop arcs over to the second strand. The first two loop carbonyls point
    # out of the strand plane (no bonding partners there); the last one points
    # +y so the next residue's amide hydrogen aims back across the gap.
    top_x = 4 * _STRAND_STEP
    loop_cas = [
        np.array([top_x + 1.9, 0.9, 0.3]),
        np.array([top_x + 2.9, _STRAND_SEP / 2.0, -0.3]),
        np.array([top_x + 1.9, _STRAND_SEP - 0.9, 0.3]),
    ]
    loop_pts = [records[4]["CA"] + np.zeros(3)] + loop_cas + \
               [np.array([top_x, _STRAND_SEP, _PLEAT])]
    plus_z = np.array([0.0, 0.0, 1.0])
    loop_o_dirs = (plus_z, plus_z, plus_y)
    for m, ca in enumerate(loop_cas, start=1):
        tangent = loop_pts[m + 1] - loop_pts[m - 1]
        add_residue(ca + _wiggle(m + 5), tangent, loop_o_dirs[m - 1])

    # Strand B along -x at y = separation; even local residues bond toward -y.
    for m in range(5):
        k = 8 + m
        ca = np.array([(4 - m) * _STRAND_STEP, _STRAND_SEP,
                       _PLEAT * (-1.0) ** m]) + _wiggle(k)
        add_residue(ca, -plus_x, minus_y if m % 2 == 0 else plus_y)

    return _chain_from_atoms(records, source_id)


KINK_RESIDUE = 4


def kinked_trace(arm: int = 4, source_id: str = "kink") -> ProteinChain:
    """CA trace with two straight arms meeting at 90 degrees.

    The chord vectors CA(i)-CA(i-2) and CA(i+2)-CA(i) straddle the corner
    only at KINK_RESIDUE, so the bend token lands there alone. Small wiggles
    keep the arm segments non-collinear without moving the chord angle past
    the 70-degree threshold anywhere else.
    """
    step = 3.0
    cas = []
    for k in range(arm + 1):
        cas.append(np.array([k * step, 0.0, 0.0]))
    for k in range(1, arm + 1):
        cas.append(np.array([arm * step, k * step, 0.0]))
    records = []
    for k, ca in enumerate(cas):
        ca = ca + _wiggle(k, amplitude=0.04)
        prev_ca = cas[k - 1] if k > 0 else None
        next_ca = cas[k + 1] if k + 1 < len(cas) else None
        if prev_ca is None:
            tangent = next_ca - ca
        elif next_ca is None:
            tangent = ca - prev_ca
        else:
            tangent = next_ca - prev_ca
        tangent = tangent / np.linalg.norm(tangent)
        n = ca - 1.0 * tangent
        c = ca + 1.0 * tangent
        # Oxygens point out of the bend plane: no H-bond network forms.
        records.append({"N": n, "CA": ca, "C": c,
                        "O": c + BOND_C_O * np.array([0.0, 0.0, 1.0])})
    return _chain_from_atoms(records, source_id)


def _translate(records, offset):
    return [{k: v + offset for k, v in rec.items()} for rec in records]


def _flip_z(records):
    flip = np.diag([1.0, 1.0, -1.0])
    return [{k: flip @ v for k, v in rec.items()} for rec in records]


def helix_bundle(per_helix: int = 18, source_id: str = "bundle") -> ProteinChain:
    """Three packed helices with chain breaks between pieces (54 residues).

    The breaks are intentional: they split segments without inventing loop
    geometry, giving a compact multi-unit structure for edge-count studies.
    Helices are lightly wiggled so their frames are data-orientable.
    """
    helix = backbone_from_dihedrals([HELIX_PHI] * per_helix, [HELIX_PSI] * per_helix)
    helix = [{k: v + _wiggle(i, 0.05) for k, v in rec.items()}
             for i, rec in enumerate(helix)]
    pieces = [
        helix,
        _translate(_flip_z(helix), np.array([10.5, 1.0, 24.0])),
        _translate(helix, np.array([5.2, 9.1, 1.5])),
    ]
    records = [rec for piece in pieces for rec in piece]
    return _chain_from_atoms(records, source_id)


def sheet_stack(source_id: str = "sheets") -> ProteinChain:
    """Four stacked hairpins with chain breaks between them (52 residues)."""
    base = beta_hairpin()
    records = []
    for level in range(4):
        offset = np.array([0.3 * level, 0.5 * level, 5.0 * level])
        for res in base.residues:
            records.append({"N": res.n + offset, "CA": res.ca + offset,
                            "C": res.c + offset, "O": res.o + offset})
    return _chain_from_atoms(records, source_id)


def random_chain(rng: np.random.Generator, n_residues: int,
                 source_id: str = "random") -> ProteinChain:
    """Self-avoiding correlated random CA walk with procedurally attached
    backbone atoms; generic with probability one."""
    cas = [np.zeros(3)]
    direction = _random_unit(rng)
    while len(cas) < n_residues:
        direction = direction + 0.9 * _random_unit(rng)
        direction /= np.linalg.norm(direction)
        candidate = cas[-1] + 3.8 * direction
        if cas and min(np.linalg.norm(candidate - p) for p in cas) < 2.0:
            direction = _random_unit(rng)
            continue
        cas.append(candidate)
    records = []
    for k, ca in enumerate(cas):
        prev_ca = cas[k - 1] if k > 0 else None
        next_ca = cas[k + 1] if k + 1 < len(cas) else None
        if prev_ca is None and next_ca is None:
            tangent = _random_unit(rng)
        elif prev_ca is None:
            tangent = next_ca - ca
        elif next_ca is None:
            tangent = ca - prev_ca
        else:
            tangent = next_ca - prev_ca
        tangent = tangent / np.linalg.norm(tangent)
        perp = np.cross(tangent, _random_unit(rng))
        perp /= np.linalg.norm(perp)
        n = ca - 1.0 * tangent
        c = ca + 1.0 * tangent
        records.append({"N": n, "CA": ca, "C": c, "O": c + BOND_C_O * perp})
    return _chain_from_atoms(records, source_id)


def random_tokens(rng: np.random.Generator, n_residues: int):
    """Random token string with geometric run lengths, for synthetic segmentations."""
    from .dssp import SSToken

    choices = [SSToken.H, SSToken.E, SSToken.T, SSToken.S, SSToken.NONE,
               SSToken.G, SSToken.B]
    tokens = []
    while len(tokens) < n_residues:
        tok = choices[rng.integers(len(choices))]
        run = 1 + int(rng.geometric(0.35))
        tokens.extend([tok] * run)
    return tokens[:n_residues]


def _random_unit(rng: np.random.Generator) -> np.ndarray:
    v = rng.standard_normal(3)
    return v / np.linalg.norm(v)
