import math

import numpy as np
import pytest

import helpers
from sshg import synth
from sshg.dssp import (
    ANTIPARALLEL,
    PARALLEL,
    AtomClash,
    HBond,
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
from sshg.pdbio import ProteinChain, Residue


def _bond_geometry():
    """Atom positions realizing r(ON)=2.88, r(CH)=3.92, r(OH)=1.92, r(CN)=3.85."""
    o = np.array([0.0, 0.0, 0.0])
    n = np.array([2.88, 0.0, 0.0])
    h = np.array([1.92, 0.0, 0.0])
    x = 5.1519 / 1.92
    y = math.sqrt(3.92 ** 2 - (x - 1.92) ** 2)
    c = np.array([x, y, 0.0])
    return o, c, n, h


def test_energy_worked_example():
    o, c, n, h = _bond_geometry()
    # confirm the construction hits the four distances first
    assert abs(np.linalg.norm(o - n) - 2.88) < 1e-12
    assert abs(np.linalg.norm(c - h) - 3.92) < 1e-12
    assert abs(np.linalg.norm(o - h) - 1.92) < 1e-12
    assert abs(np.linalg.norm(c - n) - 3.85) < 1e-12
    expected = helpers.oracle_hbond_energy(o, c, n, h)
    assert round(expected, 2) == -4.97
    donor = Residue(0, "A", "GLY", n=n, ca=n + [0, 1, 0], c=n + [1, 1, 0],
                    o=n + [1, 2, 0], h=h)
    acceptor = Residue(2, "A", "GLY", n=c + [0, -2, 0], ca=c + [0, -1, 0], c=c, o=o)
    assert abs(hbond_energy(donor, acceptor) - expected) < 1e-3


def test_energy_cancellation():
    # r(ON)=r(OH) and r(CH)=r(CN) makes the four terms cancel exactly.
    n = np.array([3.0, 0.0, 0.0])
    h = np.array([3.0, 1.0, 0.0])
    o = np.array([0.0, 0.5, 0.0])
    c = np.array([-1.0, 0.5, 0.0])
    donor = Residue(0, "A", "GLY", n=n, ca=n + [1, 0, 0], c=n + [2, 0, 0],
                    o=n + [2, 1, 0], h=h)
    acceptor = Residue(2, "A", "GLY", n=c - [1, 0, 0], ca=c - [0.5, 1, 0], c=c, o=o)
    assert abs(hbond_energy(donor, acceptor)) < 1e-12


def test_energy_clash_guard():
    o, c, n, h = _bond_geometry()
    donor = Residue(0, "A", "GLY", n=o + [0.001, 0, 0], ca=n + [0, 1, 0],
                    c=n + [1, 1, 0], o=n + [1, 2, 0], h=h)
    acceptor = Residue(2, "A", "GLY", n=c + [0, -2, 0], ca=c + [0, -1, 0], c=c, o=o)
    with pytest.raises(AtomClash):
        hbond_energy(donor, acceptor)


def test_detect_hbonds_ideal_helix():
    chain = helpers.helix(12)
    # oracle first: brute-force formula evaluation, no shared code path
    expected = helpers.oracle_all_bonds(chain)
    assert {(i, i + 4) for i in range(8)} <= expected
    got = {(b.acceptor, b.donor) for b in detect_hbonds(chain)}
    assert got == expected
    for b in detect_hbonds(chain):
        assert b.energy < -0.5
        assert abs(b.donor - b.acceptor) >= 2


def test_detect_hbonds_trivial_cases():
    # fully extended chain, 10 A spacing: no bonds
    residues = []
    for k in range(6):
        x = 10.0 * k
        residues.append(Residue(k, "A", "ALA", n=[x, 0, 0], ca=[x + 1.2, 0.6, 0],
                                c=[x + 2.4, 0, 0], o=[x + 2.4, -1.2, 0]))
    chain = ProteinChain(tuple(residues), "spread")
    from sshg.pdbio import estimate_hydrogens
    assert detect_hbonds(estimate_hydrogens(chain)) == set()
    two = ProteinChain(tuple(residues[:2]), "pair")
    assert detect_hbonds(estimate_hydrogens(two)) == set()


def test_detect_turns_rules():
    assert detect_turns({(2, 6)}) == {3: set(), 4: {2}, 5: set()}
    assert detect_turns(set()) == {3: set(), 4: set(), 5: set()}
    assert detect_turns({(0, 3), (1, 4)}) == {3: {0, 1}, 4: set(), 5: set()}


def test_detect_bridges_parallel_example():
    bridges = detect_bridges({(3, 8), (8, 5)}, n_residues=12)
    assert {(b.i, b.j, b.kind) for b in bridges} == {(4, 8, PARALLEL)}


def test_detect_bridges_antiparallel_example():
    bridges = detect_bridges({(4, 9), (9, 4)}, n_residues=12)
    assert {(b.i, b.j, b.kind) for b in bridges} == {(4, 9, ANTIPARALLEL)}


def test_detect_bridges_too_close():
    assert detect_bridges({(4, 5), (5, 4)}, n_residues=12) == set()


def test_helix_candidates_from_consecutive_turns():
    chain = helpers.helix(12)
    turns = {3: set(), 4: {1, 2}, 5: set()}
    flags = detect_structures(chain, turns, set())
    assert flags["H"] == {2, 3, 4, 5}
    assert flags["T"] == {2, 3, 4, 2 + 1, 3 + 1, 4 + 1}


def test_isolated_bridge_flags_b():
    chain = helpers.helix(12)
    bridges = detect_bridges({(4, 9), (9, 4)}, n_residues=12)
    flags = detect_structures(chain, {3: set(), 4: set(), 5: set()}, bridges)
    assert flags["B"] == {4, 9}
    assert flags["E"] == set()


def test_bend_at_kink():
    chain = helpers.kink()
    ca = chain.ca_coords()
    # oracle: direct chord-angle computation
    angle = helpers.oracle_chord_angle_deg(ca, synth.KINK_RESIDUE)
    assert angle > 70.0
    for i in range(2, len(chain) - 2):
        if i != synth.KINK_RESIDUE:
            assert helpers.oracle_chord_angle_deg(ca, i) <= 70.0
    flags = detect_structures(chain, {3: set(), 4: set(), 5: set()}, set())
    assert flags["S"] == {synth.KINK_RESIDUE}
    assert token_string(assign_tokens(chain)) == "----S----"


def test_priority_helix_beats_bend():
    chain = helpers.helix(12)
    tokens = assign_tokens(chain)
    # interior helix residues sit in bend windows too; H must win
    assert token_string(tokens) == "-HHHHHHHHHH-"


def test_hairpin_strands_marked_e():
    chain = helpers.hairpin()
    bonds = helpers.oracle_all_bonds(chain)
    # designed reciprocal pairs present per the independent oracle
    for i, j in ((2, 10), (4, 8)):
        assert (i, j) in bonds and (j, i) in bonds
    assert (0, 12) in bonds
    tokens = assign_tokens(chain)
    for strand in synth.HAIRPIN_STRANDS:
        for k in strand:
            assert tokens[k] is SSToken.E, (k, tokens[k])
    assert token_string(tokens) == "-EEEETTTEEEE-"


def test_assign_tokens_deterministic():
    chain = helpers.bundle()
    a = token_string(assign_tokens(chain))
    b = token_string(assign_tokens(chain))
    assert a == b


def test_hbond_type_invariants():
    with pytest.raises(ValueError):
        HBond(donor=3, acceptor=3, energy=-1.0)
    with pytest.raises(ValueError):
        HBond(donor=3, acceptor=4, energy=-1.0)
    with pytest.raises(ValueError):
        HBond(donor=3, acceptor=8, energy=-0.2)


def test_segment_spec_example():
    tokens = helpers.token_objects("HHHHHEEEE--TTT")
    segs = segment(tokens)
    assert [(s.start, s.end, s.token.letter) for s in segs] == [
        (0, 4, "H"), (5, 8, "E"), (9, 10, "-"), (11, 13, "T")]
    assert [len(s) for s in segs] == [5, 4, 2, 3]


def test_segment_trivial_cases():
    assert [(s.start, s.end) for s in segment(helpers.token_objects("H"))] == [(0, 0)]
    assert len(segment(helpers.token_objects("HEH"))) == 3


def test_segment_partitions_chain():
    for letters in ("HHHHEE--TTS", "E", "-----", "HBEGITS-"):
        tokens = helpers.token_objects(letters)
        segs = segment(tokens)
        assert sum(len(s) for s in segs) == len(tokens)
        pos = 0
        for s in segs:
            assert s.start == pos
            pos = s.end + 1
        assert pos == len(tokens)


def test_segment_splits_at_breaks():
    tokens = helpers.token_objects("HHHH")
    segs = segment(tokens, breaks=frozenset({1}))
    assert [(s.start, s.end) for s in segs] == [(0, 1), (2, 3)]


def test_no_adjacent_hbonds_property():
    for chain in (helpers.helix(10), helpers.hairpin(), helpers.bundle()):
        for b in detect_hbonds(chain):
            assert abs(b.donor - b.acceptor) >= 2


def test_breaks_block_patterns():
    chain = helpers.bundle()
    bonds = detect_hbonds(chain)
    # donors right after a break (18, 36) must not appear
    donors = {b.donor for b in bonds}
    assert 18 not in donors and 36 not in donors
    tokens = assign_tokens(chain)
    assert token_string(tokens) == ("-" + "H" * 16 + "-") * 3
