"""Fixed-order molecular descriptors computed from the parsed graph.

The 20-descriptor schema below is versioned; classifier model files record
the version and refuse vectors from any other schema.
"""
from __future__ import annotations

import numpy as np

from smigan.chem import (
    ATOMIC_MASS,
    HALOGENS,
    MolecularGraph,
    bridge_bonds,
    canonicalize,
    tokenize,
)

SCHEMA_VERSION = "desc-v1"

DESCRIPTOR_NAMES = (
    "heavy_atoms",          # count of non-hydrogen atoms
    "mol_weight",           # standard atomic masses incl. attached hydrogens
    "n_count",
    "o_count",
    "s_count",
    "halogen_count",
    "carbon_fraction",      # C / heavy atoms
    "nos_ratio",            # (N + O + S) / heavy atoms
    "halogen_ratio",
    "ring_count",           # SSSR size
    "aromatic_rings",
    "aliphatic_rings",
    "max_ring_size",
    "fused_aromatic_pairs",  # aromatic SSSR ring pairs sharing >= 2 atoms
    "rotatable_bonds",
    "hbd_count",            # N-H / O-H donors
    "hba_count",            # N + O acceptors
    "sp3_carbon_fraction",
    "net_charge",
    "canonical_token_len",
)


def fused_aromatic_pairs(graph: MolecularGraph) -> list[tuple[int, int]]:
    """Index pairs of aromatic SSSR rings sharing at least two atoms."""
    arom = [i for i, flag in enumerate(graph.ring_aromatic) if flag]
    pairs = []
    for ai in range(len(arom)):
        for bi in range(ai + 1, len(arom)):
            shared = set(graph.rings[arom[ai]]) & set(graph.rings[arom[bi]])
            if len(shared) >= 2:
                pairs.append((arom[ai], arom[bi]))
    return pairs


def rotatable_bond_count(graph: MolecularGraph) -> int:
    """Single non-ring bonds between heavy atoms each bonded to >= 2 heavy
    atoms, excluding amide C-N."""
    bridges = bridge_bonds(graph)
    heavy_deg = [0] * len(graph.atoms)
    for bond in graph.bonds:
        if graph.atoms[bond.a].element != "H" and graph.atoms[bond.b].element != "H":
            heavy_deg[bond.a] += 1
            heavy_deg[bond.b] += 1
    count = 0
    for bi, bond in enumerate(graph.bonds):
        if bond.order != 1 or bi not in bridges:
            continue
        a, b = graph.atoms[bond.a], graph.atoms[bond.b]
        if a.element == "H" or b.element == "H":
            continue
        if heavy_deg[bond.a] < 2 or heavy_deg[bond.b] < 2:
            continue
        if _is_amide(graph, bond.a, bond.b) or _is_amide(graph, bond.b, bond.a):
            continue
        count += 1
    return count


def _is_amide(graph: MolecularGraph, c_idx: int, n_idx: int) -> bool:
    if graph.atoms[c_idx].element != "C" or graph.atoms[n_idx].element != "N":
        return False
    for other, bond in graph.neighbors(c_idx):
        if bond.order == 2 and graph.atoms[other].element == "O":
            return True
    return False


def compute_descriptors(graph: MolecularGraph) -> np.ndarray:
    """Return the 20-value descriptor vector in DESCRIPTOR_NAMES order."""
    heavy = [a for a in graph.atoms if a.element != "H"]
    n_heavy = len(heavy)
    # count-first so the float sum is independent of atom order
    element_counts: dict[str, int] = {}
    for a in graph.atoms:
        element_counts[a.element] = element_counts.get(a.element, 0) + 1
    weight = sum(ATOMIC_MASS[el] * n for el, n in sorted(element_counts.items()))
    weight += sum(a.hydrogens for a in graph.atoms) * ATOMIC_MASS["H"]

    n_count = sum(1 for a in heavy if a.element == "N")
    o_count = sum(1 for a in heavy if a.element == "O")
    s_count = sum(1 for a in heavy if a.element == "S")
    hal_count = sum(1 for a in heavy if a.element in HALOGENS)
    c_count = sum(1 for a in heavy if a.element == "C")

    arom_rings = sum(1 for f in graph.ring_aromatic if f)
    ring_count = len(graph.rings)
    max_ring = max((len(r) for r in graph.rings), default=0)

    carbons = [i for i, a in enumerate(graph.atoms) if a.element == "C"]
    sp3 = 0
    for i in carbons:
        if graph.atoms[i].aromatic:
            continue
        if all(b.order == 1 for _, b in graph.neighbors(i)):
            sp3 += 1

    hbd = 0
    hba = 0
    for a in graph.atoms:
        if a.element in ("N", "O"):
            hba += 1
            if a.hydrogens > 0:
                hbd += 1

    values = np.array([
        n_heavy,
        weight,
        n_count,
        o_count,
        s_count,
        hal_count,
        c_count / n_heavy if n_heavy else 0.0,
        (n_count + o_count + s_count) / n_heavy if n_heavy else 0.0,
        hal_count / n_heavy if n_heavy else 0.0,
        ring_count,
        arom_rings,
        ring_count - arom_rings,
        max_ring,
        len(fused_aromatic_pairs(graph)),
        rotatable_bond_count(graph),
        hbd,
        hba,
        sp3 / len(carbons) if carbons else 0.0,
        sum(a.charge for a in graph.atoms),
        len(tokenize(canonicalize(graph))),
    ], dtype=np.float64)
    return values
