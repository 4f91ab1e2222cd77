"""Secondary-structure assignment by hydrogen-bond pattern analysis
(Kabsch-Sander style) and segmentation into maximal same-token runs.

The pipeline is: detect backbone H-bonds from the electrostatic energy
model, derive n-turns and bridges, grow helices / ladders / bends, then
resolve each residue to a single token by the fixed priority
H, B, E, G, I, T, S. Chain breaks act as hard pattern boundaries.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.spatial.distance import cdist

from .pdbio import ProteinChain, Residue, peptide_breaks

# 0.084 * 332 kcal/mol: partial charges times the electrostatic constant.
ENERGY_FACTOR = 27.888
DEFAULT_ENERGY_THRESHOLD = -0.5
ATOM_CLASH_DISTANCE = 0.01
BEND_ANGLE_DEG = 70.0
# Donor/acceptor pairs with CA atoms farther apart than this cannot reach
# bonding energy; used only to prune the pair loop.
_CA_PREFILTER = 9.0


class AtomClash(ValueError):
    """Donor/acceptor atoms closer than the clash distance; pair is non-bonded."""


class SSToken(Enum):
    """Per-residue secondary-structure token letters.

    H alpha-helix, B isolated beta-bridge, E strand, G 3-10 helix,
    I pi-helix, P kappa-helix (declared, never assigned), T turn, S bend,
    NONE ('-') no structure.
    """

    H = "H"
    B = "B"
    E = "E"
    G = "G"
    I = "I"
    P = "P"
    T = "T"
    S = "S"
    NONE = "-"

    @property
    def letter(self) -> str:
        return self.value

    @classmethod
    def from_letter(cls, letter: str) -> "SSToken":
        for tok in cls:
            if tok.value == letter:
                return tok
        raise ValueError(f"unknown secondary-structure letter {letter!r}")


TOKEN_ORDER = (SSToken.H, SSToken.B, SSToken.E, SSToken.G, SSToken.I,
               SSToken.P, SSToken.T, SSToken.S, SSToken.NONE)
TOKEN_INDEX = {tok: k for k, tok in enumerate(TOKEN_ORDER)}


@dataclass(frozen=True)
class HBond:
    """Backbone H-bond: C=O of `acceptor` to N-H of `donor`."""

    donor: int
    acceptor: int
    energy: float

    def __post_init__(self):
        if self.donor == self.acceptor:
            raise ValueError("donor and acceptor must differ")
        if abs(self.donor - self.acceptor) < 2:
            raise ValueError("chain-adjacent H-bonds are excluded")
        if not self.energy < DEFAULT_ENERGY_THRESHOLD:
            raise ValueError(f"H-bond energy {self.energy} is not below "
                             f"{DEFAULT_ENERGY_THRESHOLD} kcal/mol")


@dataclass(frozen=True)
class Segment:
    """Maximal run of consecutive residues sharing one token, inclusive ends."""

    start: int
    end: int
    token: SSToken

    def __post_init__(self):
        if self.end < self.start:
            raise ValueError("segment end before start")

    def __len__(self) -> int:
        return self.end - self.start + 1

    @property
    def indices(self) -> range:
        return range(self.start, self.end + 1)


def hbond_energy(donor: Residue, acceptor: Residue) -> float:
    """Electrostatic H-bond energy in kcal/mol between the acceptor's C=O
    group and the donor's N-H group:

        E = 27.888 * (1/r(ON) + 1/r(CH) - 1/r(OH) - 1/r(CN))

    Raises AtomClash when any of the four distances collapses.
    """
    if donor.h is None:
        raise ValueError("donor residue has no estimated amide hydrogen")
    r_on = float(np.linalg.norm(acceptor.o - donor.n))
    r_ch = float(np.linalg.norm(acceptor.c - donor.h))
    r_oh = float(np.linalg.norm(acceptor.o - donor.h))
    r_cn = float(np.linalg.norm(acceptor.c - donor.n))
    smallest = min(r_on, r_ch, r_oh, r_cn)
    if smallest <= ATOM_CLASH_DISTANCE:
        raise AtomClash(f"interatomic distance {smallest:.4f} A at or below clash limit")
    return ENERGY_FACTOR * (1.0 / r_on + 1.0 / r_ch - 1.0 / r_oh - 1.0 / r_cn)


def detect_hbonds(chain: ProteinChain,
                  threshold: float = DEFAULT_ENERGY_THRESHOLD) -> set[HBond]:
    """All H-bonds with energy below `threshold` and |donor - acceptor| >= 2.

    Hydrogens must have been estimated first; residues without one never
    donate, and neither does a residue straight after a chain break (its
    estimated hydrogen points along a bond that does not exist). Clashing
    pairs are treated as non-bonded.
    """
    residues = chain.residues
    n = len(residues)
    if n < 3:
        return set()
    breaks = peptide_breaks(chain)
    ca = chain.ca_coords()
    ca_dist = cdist(ca, ca)
    bonds = set()
    for i in range(n):           # acceptor: provides C=O
        for j in range(n):       # donor: provides N-H
            if abs(i - j) < 2 or residues[j].h is None or (j - 1) in breaks:
                continue
            if ca_dist[i, j] > _CA_PREFILTER:
                continue
            try:
                e = hbond_energy(residues[j], residues[i])
            except AtomClash:
                continue
            if e < threshold:
                bonds.add(HBond(donor=j, acceptor=i, energy=e))
    return bonds


def _hbond_pairs(hbonds) -> set[tuple[int, int]]:
    """Normalize to (acceptor, donor) index pairs; accepts HBond objects or
    bare (acceptor, donor) tuples."""
    pairs = set()
    for hb in hbonds:
        if isinstance(hb, HBond):
            pairs.add((hb.acceptor, hb.donor))
        else:
            i, j = hb
            pairs.add((int(i), int(j)))
    return pairs


def _spans_break(lo: int, hi: int, breaks: frozenset[int]) -> bool:
    """True if any peptide bond in [lo, hi) is broken."""
    return any(lo <= b < hi for b in breaks)


def detect_turns(hbonds, breaks: frozenset[int] = frozenset()) -> dict[int, set[int]]:
    """n-turn flags for n in {3, 4, 5}: an n-turn exists at residue i when
    the bond C=O(i) -> N-H(i+n) is present and spans no chain break."""
    pairs = _hbond_pairs(hbonds)
    turns: dict[int, set[int]] = {3: set(), 4: set(), 5: set()}
    for i, j in pairs:
        n = j - i
        if n in turns and not _spans_break(i, j, breaks):
            turns[n].add(i)
    return turns


PARALLEL = "parallel"
ANTIPARALLEL = "antiparallel"


@dataclass(frozen=True)
class Bridge:
    i: int
    j: int
    kind: str


def detect_bridges(hbonds, n_residues: int,
                   breaks: frozenset[int] = frozenset()) -> set[Bridge]:
    """Bridges between non-overlapping three-residue stretches (|i - j| >= 3).

    Parallel:      Hbond(i-1, j) and Hbond(j, i+1), or
                   Hbond(j-1, i) and Hbond(i, j+1).
    Antiparallel:  Hbond(i, j) and Hbond(j, i), or
                   Hbond(i-1, j+1) and Hbond(j-1, i+1).
    """
    pairs = _hbond_pairs(hbonds)

    def hb(a, b):
        return (a, b) in pairs

    bridges = set()
    for i in range(1, n_residues - 1):
        if _spans_break(i - 1, i + 1, breaks):
            continue
        for j in range(i + 3, n_residues - 1):
            if _spans_break(j - 1, j + 1, breaks):
                continue
            parallel = (hb(i - 1, j) and hb(j, i + 1)) or (hb(j - 1, i) and hb(i, j + 1))
            anti = (hb(i, j) and hb(j, i)) or (hb(i - 1, j + 1) and hb(j - 1, i + 1))
            if parallel:
                bridges.add(Bridge(i, j, PARALLEL))
            if anti and not parallel:
                bridges.add(Bridge(i, j, ANTIPARALLEL))
    return bridges


def _ladders(bridges: set[Bridge]) -> list[list[Bridge]]:
    """Group bridges into ladders: runs of consecutive bridges of one type,
    (i, j) -> (i+1, j+1) for parallel and (i, j) -> (i+1, j-1) for antiparallel."""
    index = {(b.i, b.j, b.kind): b for b in bridges}

    def successor(b: Bridge):
        j_next = b.j + 1 if b.kind == PARALLEL else b.j - 1
        return index.get((b.i + 1, j_next, b.kind))

    has_pred = set()
    for b in bridges:
        nxt = successor(b)
        if nxt is not None:
            has_pred.add((nxt.i, nxt.j, nxt.kind))
    ladders = []
    for b in sorted(bridges, key=lambda x: (x.i, x.j, x.kind)):
        if (b.i, b.j, b.kind) in has_pred:
            continue
        run = [b]
        while (nxt := successor(run[-1])) is not None:
            run.append(nxt)
        ladders.append(run)
    return ladders


def detect_structures(chain: ProteinChain,
                      turns: dict[int, set[int]],
                      bridges: set[Bridge],
                      breaks: frozenset[int] = frozenset()) -> dict[str, set[int]]:
    """Candidate structure flags per residue.

    An n-helix runs from i to i+n-1 when there are n-turns at both i-1 and
    i (n=4 -> H, n=3 -> G, n=5 -> I). Ladders of two or more consecutive
    bridges mark E on both strands; a lone bridge marks B. Residues bracketed
    by an n-turn get T, and a five-residue window with its CA chord angle
    above 70 degrees gets S at the center.
    """
    n = len(chain)
    flags: dict[str, set[int]] = {k: set() for k in "HBEGITS"}
    for turn_n, letter in ((4, "H"), (3, "G"), (5, "I")):
        for i in turns[turn_n]:
            if i - 1 in turns[turn_n]:
                flags[letter].update(range(i, min(i + turn_n, n)))
    for ladder in _ladders(bridges):
        residues = set()
        for b in ladder:
            residues.update((b.i, b.j))
        flags["E" if len(ladder) > 1 else "B"].update(residues)
    for turn_n, starts in turns.items():
        for i in starts:
            flags["T"].update(range(i + 1, min(i + turn_n, n)))
    ca = chain.ca_coords()
    for i in range(2, n - 2):
        if _spans_break(i - 2, i + 2, breaks):
            continue
        u = ca[i] - ca[i - 2]
        v = ca[i + 2] - ca[i]
        cosang = float(np.dot(u, v) / (np.linalg.norm(u) * np.linalg.norm(v)))
        angle = float(np.degrees(np.arccos(np.clip(cosang, -1.0, 1.0))))
        if angle > BEND_ANGLE_DEG:
            flags["S"].add(i)
    return flags


_PRIORITY = (("H", SSToken.H), ("B", SSToken.B), ("E", SSToken.E),
             ("G", SSToken.G), ("I", SSToken.I), ("T", SSToken.T),
             ("S", SSToken.S))


def assign_tokens(chain: ProteinChain,
                  threshold: float = DEFAULT_ENERGY_THRESHOLD) -> list[SSToken]:
    """One token per residue, resolved by priority H, B, E, G, I, T, S.

    The chain must have estimated hydrogens (see pdbio.estimate_hydrogens).
    Token P is reserved but never produced.
    """
    breaks = peptide_breaks(chain)
    hbonds = detect_hbonds(chain, threshold=threshold)
    turns = detect_turns(hbonds, breaks)
    bridges = detect_bridges(hbonds, len(chain), breaks)
    flags = detect_structures(chain, turns, bridges, breaks)
    tokens = []
    for k in range(len(chain)):
        for letter, tok in _PRIORITY:
            if k in flags[letter]:
                tokens.append(tok)
                break
        else:
            tokens.append(SSToken.NONE)
    return tokens


def segment(tokens: list[SSToken],
            breaks: frozenset[int] = frozenset()) -> list[Segment]:
    """Maximal runs of equal token covering all indices, split at chain breaks."""
    if not tokens:
        raise ValueError("empty token list")
    segments = []
    start = 0
    for k in range(1, len(tokens)):
        if tokens[k] != tokens[k - 1] or (k - 1) in breaks:
            segments.append(Segment(start, k - 1, tokens[start]))
            start = k
    segments.append(Segment(start, len(tokens) - 1, tokens[start]))
    return segments


def token_string(tokens: list[SSToken]) -> str:
    return "".join(t.letter for t in tokens)
