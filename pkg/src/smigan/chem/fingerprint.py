"""Circular (Morgan-style) fingerprints and Tanimoto similarity."""
from __future__ import annotations

from dataclasses import dataclass

from smigan.errors import SmiganError
from smigan.chem.parser import MolecularGraph

_ELEMENT_CODE = {
    "H": 1, "B": 5, "C": 6, "N": 7, "O": 8, "F": 9, "P": 15, "S": 16,
    "Cl": 17, "Br": 35, "I": 53,
}

_MASK = (1 << 64) - 1


def _mix(*values: int) -> int:
    """Deterministic splitmix64-style hash over an integer tuple."""
    h = 0x9E3779B97F4A7C15
    for v in values:
        h = (h ^ (v & _MASK)) * 0xBF58476D1CE4E5B9 & _MASK
        h = (h ^ (h >> 27)) * 0x94D049BB133111EB & _MASK
        h ^= h >> 31
    return h


class WidthMismatch(SmiganError):
    pass


@dataclass(frozen=True)
class Fingerprint:
    bits: frozenset[int]
    width: int
    radius: int

    def count(self) -> int:
        return len(self.bits)


def fingerprint(graph: MolecularGraph, radius: int = 2, width: int = 2048) -> Fingerprint:
    """Hash each atom's neighborhood out to `radius` and fold into `width` bits.

    Invariant under atom-order permutation; at most atoms x (radius + 1)
    bits are set.
    """
    if radius < 0:
        raise ValueError("radius must be >= 0")
    if width <= 0 or width & (width - 1):
        raise ValueError("width must be a positive power of two")
    adj: list[list[tuple[int, int]]] = [[] for _ in graph.atoms]
    for bond in graph.bonds:
        adj[bond.a].append((bond.order, bond.b))
        adj[bond.b].append((bond.order, bond.a))

    inv = [
        _mix(_ELEMENT_CODE.get(a.element, 99), a.charge & 0xFF, a.hydrogens,
             len(adj[i]), int(a.aromatic))
        for i, a in enumerate(graph.atoms)
    ]
    bits = {h % width for h in inv}
    for _ in range(radius):
        new = []
        for i in range(len(graph.atoms)):
            env = sorted((order, inv[j]) for order, j in adj[i])
            flat = [inv[i]]
            for order, h in env:
                flat.extend((order, h))
            new.append(_mix(*flat))
        inv = new
        bits.update(h % width for h in inv)
    return Fingerprint(frozenset(bits), width, radius)


def tanimoto(a: Fingerprint, b: Fingerprint) -> float:
    """|a AND b| / |a OR b|; defined as 1.0 when both are empty."""
    if a.width != b.width:
        raise WidthMismatch(f"fingerprint widths differ: {a.width} vs {b.width}")
    union = len(a.bits | b.bits)
    if union == 0:
        return 1.0
    return len(a.bits & b.bits) / union
