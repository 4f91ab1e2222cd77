import numpy as np
import pytest

from sshg import synth
from sshg.pdbio import (
    EmptyStructure,
    MalformedRecord,
    estimate_hydrogens,
    parse_pdb,
    peptide_breaks,
    to_pdb,
    transform_chain,
)
from sshg.geometry import random_rigid_motion

CA_LINE = "ATOM      1  CA  ALA A   1      11.104   6.134  -6.504  1.00  0.00           C"


def _full_residue(serial, resseq, chain="A", aa="ALA", offset=0.0):
    lines = []
    coords = {
        "N": (0.0 + offset, 0.0, 0.0),
        "CA": (1.5 + offset, 0.0, 0.0),
        "C": (2.2 + offset, 1.3, 0.0),
        "O": (3.0 + offset, 1.5, 0.8),
    }
    for k, (name, (x, y, z)) in enumerate(coords.items()):
        lines.append(
            f"ATOM  {serial + k:5d}  {name:<3s}{aa:>4s} {chain}{resseq:4d}    "
            f"{x:8.3f}{y:8.3f}{z:8.3f}  1.00  0.00"
        )
    return lines


def test_parse_fixed_columns():
    parsed = parse_pdb("\n".join(_full_residue(1, 1)) + "\n" + CA_LINE.replace("   1 ", "   2 "))
    chain = parsed.chains[0]
    assert chain.chain_id == "A"
    assert len(chain) == 1  # second residue has only a CA and is dropped
    assert parsed.dropped_residues == 1
    res = chain.residues[0]
    assert res.aa_type == "ALA"
    assert np.allclose(res.ca, [1.5, 0.0, 0.0])


def test_parse_ca_example_coordinates():
    parsed = parse_pdb("\n".join(_full_residue(1, 1)))
    # splice the documented CA line into a complete residue to check columns
    text = CA_LINE
    assert float(text[30:38]) == 11.104
    assert float(text[38:46]) == 6.134
    assert float(text[46:54]) == -6.504
    assert text[21] == "A"
    assert text[12:16].strip() == "CA"
    assert parsed.chains[0].residues[0].seq_index == 0


def test_parse_hetatm_only_is_empty():
    text = "HETATM    1  O   HOH A   1       0.000   0.000   0.000  1.00  0.00\n"
    with pytest.raises(EmptyStructure):
        parse_pdb(text)


def test_parse_malformed_coordinate():
    bad = CA_LINE[:30] + "  xx.xxx" + CA_LINE[38:]
    with pytest.raises(MalformedRecord) as err:
        parse_pdb(bad)
    assert "line 1" in str(err.value)


def test_parse_altloc_and_models():
    res = _full_residue(1, 1)
    altb = res[1][:16] + "B" + res[1][17:]  # CA with altLoc B: skipped
    text = "\n".join([res[0], altb, res[2], res[3]] + _full_residue(5, 2, offset=3.8))
    parsed = parse_pdb(text)
    assert parsed.dropped_residues == 1  # residue 1 lost its only CA
    assert len(parsed.chains[0]) == 1
    two_models = "MODEL     1\n" + "\n".join(res) + "\nENDMDL\nMODEL     2\n" + \
        "\n".join(_full_residue(10, 2, offset=50.0)) + "\nENDMDL\n"
    parsed = parse_pdb(two_models)
    assert len(parsed.chains[0]) == 1  # first model only


def test_parse_multi_chain_and_renumbering():
    lines = []
    lines += _full_residue(1, 7, chain="A")
    lines += _full_residue(5, 9, chain="A", offset=3.8)
    lines += _full_residue(9, 4, chain="B", offset=20.0)
    parsed = parse_pdb("\n".join(lines))
    assert [ch.chain_id for ch in parsed.chains] == ["A", "B"]
    assert [r.seq_index for r in parsed.chains[0].residues] == [0, 1]


def test_roundtrip_serialization():
    chain = synth.ideal_helix(10)
    text = to_pdb([chain])
    parsed = parse_pdb(text)
    text2 = to_pdb(parsed.chains)
    assert text == text2
    reparsed = parse_pdb(text2)
    for r1, r2 in zip(parsed.chains[0].residues, reparsed.chains[0].residues):
        assert r1.aa_type == r2.aa_type
        for atom in ("n", "ca", "c", "o"):
            assert np.array_equal(getattr(r1, atom), getattr(r2, atom))


def test_estimate_hydrogens_geometry():
    chain = synth.ideal_helix(8)
    hydro = estimate_hydrogens(chain)
    assert hydro.residues[0].h is None
    for i in range(1, 8):
        res = hydro.residues[i]
        assert res.h is not None
        assert abs(np.linalg.norm(res.h - res.n) - 1.0) < 1e-12


def test_estimate_hydrogens_worked_example():
    # C(0)=(0,0,0), O(0)=(0,0,1), N(1)=(3,0,0) -> h(1)=(3,0,-1)
    from sshg.pdbio import ProteinChain, Residue
    r0 = Residue(0, "A", "ALA", n=[-1.4, 0, 0], ca=[-0.5, 1, 0], c=[0, 0, 0], o=[0, 0, 1])
    r1 = Residue(1, "A", "GLY", n=[3, 0, 0], ca=[4, 1, 0], c=[5, 0, 0], o=[5.5, 0, 1])
    chain = ProteinChain((r0, r1))
    hydro = estimate_hydrogens(chain)
    assert np.allclose(hydro.residues[1].h, [3, 0, -1])


def test_estimate_hydrogens_proline_and_singleton():
    chain = synth.ideal_helix(5)
    residues = list(chain.residues)
    from dataclasses import replace
    residues[2] = replace(residues[2], aa_type="PRO")
    chain = type(chain)(tuple(residues), chain.source_id)
    hydro = estimate_hydrogens(chain)
    assert hydro.residues[2].h is None
    single = type(chain)((chain.residues[0],), "single")
    assert estimate_hydrogens(single).residues[0].h is None


def test_peptide_breaks_detected():
    chain = synth.helix_bundle()
    assert peptide_breaks(chain) == frozenset({17, 35})
    assert peptide_breaks(synth.ideal_helix(12)) == frozenset()


def test_transform_chain_is_exact():
    rng = np.random.default_rng(8)
    chain = estimate_hydrogens(synth.ideal_helix(9))
    m = random_rigid_motion(rng)
    moved = transform_chain(chain, m)
    re_estimated = estimate_hydrogens(transform_chain(synth.ideal_helix(9), m))
    for a, b in zip(moved.residues, re_estimated.residues):
        assert np.max(np.abs(a.h - b.h)) < 1e-9 if a.h is not None else b.h is None
