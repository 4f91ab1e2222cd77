"""PDB ingestion: fixed-column ATOM parsing into backbone-only chains, amide
hydrogen estimation, and the ATOM writer used for round-trip checks.

Only N/CA/C/O backbone atoms are kept; side chains, HETATM records and every
model after the first are ignored.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import IO

import numpy as np

from .geometry import RigidMotion, as_vec3

# Peptide-bond sanity limit; C(i)-N(i+1) at or above this is a chain break.
PEPTIDE_BOND_MAX = 2.5

_BACKBONE = ("N", "CA", "C", "O")


class MalformedRecord(ValueError):
    """An ATOM record failed fixed-column numeric parsing."""


class EmptyStructure(ValueError):
    """No residue with a complete N/CA/C/O backbone was found."""


@dataclass(frozen=True)
class Residue:
    seq_index: int
    chain_id: str
    aa_type: str
    n: np.ndarray
    ca: np.ndarray
    c: np.ndarray
    o: np.ndarray
    h: np.ndarray | None = None

    def __post_init__(self):
        for name in ("n", "ca", "c", "o"):
            object.__setattr__(self, name, as_vec3(getattr(self, name)))
        if self.h is not None:
            object.__setattr__(self, "h", as_vec3(self.h))


@dataclass(frozen=True)
class ProteinChain:
    residues: tuple
    source_id: str = ""

    def __post_init__(self):
        res = tuple(self.residues)
        if not res:
            raise ValueError("empty chain")
        for k, r in enumerate(res):
            if r.seq_index != k:
                raise ValueError(f"seq_index must run 0..{len(res) - 1}, got {r.seq_index} at {k}")
        object.__setattr__(self, "residues", res)

    def __len__(self) -> int:
        return len(self.residues)

    @property
    def chain_id(self) -> str:
        return self.residues[0].chain_id

    def ca_coords(self) -> np.ndarray:
        return np.array([r.ca for r in self.residues])


@dataclass(frozen=True)
class ParsedStructure:
    chains: tuple
    dropped_residues: int
    source_id: str

    def chain(self, chain_id: str | None = None) -> ProteinChain:
        if chain_id is None:
            return self.chains[0]
        for ch in self.chains:
            if ch.chain_id == chain_id:
                return ch
        raise KeyError(f"no chain {chain_id!r} in {self.source_id}")


def parse_pdb(data: str | bytes | IO, source_id: str = "<pdb>") -> ParsedStructure:
    """Parse PDB text into backbone-only chains.

    Fixed columns: record name 1-6, atom name 13-16, altLoc 17, resName
    18-20, chainID 22, resSeq 23-26, iCode 27, x/y/z 31-54. altLoc other
    than blank or 'A' is skipped, as are HETATM records and models after the
    first. Residues missing any backbone atom are dropped and counted.
    """
    if hasattr(data, "read"):
        data = data.read()
    if isinstance(data, bytes):
        data = data.decode("ascii", errors="replace")

    residues: dict[tuple, dict] = {}
    order: list[tuple] = []
    model_count = 0
    for lineno, line in enumerate(data.splitlines(), start=1):
        record = line[0:6]
        if record.startswith("MODEL"):
            model_count += 1
            if model_count > 1:
                break
            continue
        if record.startswith("ENDMDL"):
            break
        if record != "ATOM  ":
            continue
        if len(line) < 54:
            raise MalformedRecord(f"line {lineno}: ATOM record too short")
        atom_name = line[12:16].strip()
        alt_loc = line[16]
        if alt_loc not in (" ", "A", ""):
            continue
        if atom_name not in _BACKBONE:
            continue
        res_name = line[17:20].strip()
        chain_id = line[21]
        res_seq = line[22:26]
        i_code = line[26] if len(line) > 26 else " "
        try:
            xyz = (float(line[30:38]), float(line[38:46]), float(line[46:54]))
        except ValueError:
            raise MalformedRecord(f"line {lineno}: bad coordinate field") from None
        key = (chain_id, res_seq.strip(), i_code)
        if key not in residues:
            residues[key] = {"aa": res_name, "chain": chain_id}
            order.append(key)
        residues[key].setdefault(atom_name, np.array(xyz))

    per_chain: dict[str, list[Residue]] = {}
    chain_order: list[str] = []
    dropped = 0
    for key in order:
        rec = residues[key]
        if not all(a in rec for a in _BACKBONE):
            dropped += 1
            continue
        cid = rec["chain"]
        if cid not in per_chain:
            per_chain[cid] = []
            chain_order.append(cid)
        per_chain[cid].append(
            Residue(
                seq_index=len(per_chain[cid]),
                chain_id=cid,
                aa_type=rec["aa"],
                n=rec["N"],
                ca=rec["CA"],
                c=rec["C"],
                o=rec["O"],
            )
        )
    chains = tuple(
        ProteinChain(tuple(per_chain[cid]), source_id=f"{source_id}:{cid.strip() or '_'}")
        for cid in chain_order
    )
    if not chains:
        raise EmptyStructure(f"{source_id}: no complete backbone residue found")
    return ParsedStructure(chains=chains, dropped_residues=dropped, source_id=source_id)


def to_pdb(chains) -> str:
    """Serialize chains back to fixed-column ATOM records."""
    lines = []
    serial = 1
    for chain in chains:
        for res in chain.residues:
            for name in _BACKBONE:
                x, y, z = getattr(res, name.lower())
                lines.append(
                    f"ATOM  {serial:5d}  {name:<3s}{res.aa_type:>4s} {res.chain_id}"
                    f"{res.seq_index + 1:4d}    {x:8.3f}{y:8.3f}{z:8.3f}  1.00  0.00"
                )
                serial += 1
        lines.append("TER")
    lines.append("END")
    return "\n".join(lines) + "\n"


def peptide_breaks(chain: ProteinChain) -> frozenset[int]:
    """Indices i where the bond between residues i and i+1 is broken."""
    breaks = set()
    for i in range(len(chain) - 1):
        gap = np.linalg.norm(chain.residues[i].c - chain.residues[i + 1].n)
        if gap >= PEPTIDE_BOND_MAX:
            breaks.add(i)
    return frozenset(breaks)


def estimate_hydrogens(chain: ProteinChain) -> ProteinChain:
    """Place amide hydrogens 1.0 A from N along the previous carbonyl C->O
    direction reversed: h(i) = N(i) + (C(i-1) - O(i-1)) / ||C(i-1) - O(i-1)||.

    The first residue and prolines get no hydrogen and never act as donors.
    Hydrogens are placed across chain breaks too (the geometry is the
    caller's statement of record); the bond-pattern stage is what refuses to
    use donors that sit right after a break.
    """
    out = []
    for i, res in enumerate(chain.residues):
        if i == 0 or res.aa_type == "PRO":
            out.append(replace(res, h=None))
            continue
        prev = chain.residues[i - 1]
        v = prev.c - prev.o
        norm = np.linalg.norm(v)
        if norm <= 1e-9:
            out.append(replace(res, h=None))
            continue
        out.append(replace(res, h=res.n + v / norm))
    return ProteinChain(tuple(out), source_id=chain.source_id)


def transform_chain(chain: ProteinChain, motion: RigidMotion) -> ProteinChain:
    """Apply a rigid motion to every atom, hydrogens included."""
    out = []
    for res in chain.residues:
        out.append(
            replace(
                res,
                n=motion.apply(res.n),
                ca=motion.apply(res.ca),
                c=motion.apply(res.c),
                o=motion.apply(res.o),
                h=None if res.h is None else motion.apply(res.h),
            )
        )
    return ProteinChain(tuple(out), source_id=chain.source_id)
