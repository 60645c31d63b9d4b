"""Rule-based structural scoring applied on top of classifier probability."""
from __future__ import annotations

from dataclasses import asdict, dataclass

from smigan.chem import MolecularGraph, antiaromatic_rings
from smigan.descriptors import DESCRIPTOR_NAMES, compute_descriptors, fused_aromatic_pairs

_IDX = {name: i for i, name in enumerate(DESCRIPTOR_NAMES)}


@dataclass(frozen=True)
class StructuralRules:
    """Thresholds and multipliers for one molecule class."""
    nos_ratio_max: float = 0.5
    nos_penalty: float = 0.5
    macro_ring_size: int = 12
    macro_penalty: float = 0.5
    antiaromatic_penalty: float = 0.5
    halogen_ratio_max: float = 0.35
    halogen_penalty: float = 0.2
    carbon_fraction_max: float = 0.95
    carbon_penalty: float = 0.5
    fused_hetero_bonus: float = 1.2

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "StructuralRules":
        return cls(**d)


def structural_score(graph: MolecularGraph, rules: StructuralRules = StructuralRules()) -> float:
    """Multiplier in [0, 1]: heteroatom excess, macrocycles, anti-aromatic
    rings, halogen excess, and carbon-dominant structures are penalized;
    heteroatom-bearing fused aromatic systems earn a capped bonus."""
    v = compute_descriptors(graph)
    score = 1.0
    if v[_IDX["nos_ratio"]] > rules.nos_ratio_max:
        score *= rules.nos_penalty
    if v[_IDX["max_ring_size"]] > rules.macro_ring_size:
        score *= rules.macro_penalty
    if antiaromatic_rings(graph):
        score *= rules.antiaromatic_penalty
    if v[_IDX["halogen_ratio"]] > rules.halogen_ratio_max:
        score *= rules.halogen_penalty
    if v[_IDX["carbon_fraction"]] > rules.carbon_fraction_max:
        score *= rules.carbon_penalty
    if _has_hetero_fused_pair(graph):
        score *= rules.fused_hetero_bonus
    return min(score, 1.0)


def _has_hetero_fused_pair(graph: MolecularGraph) -> bool:
    for ri, rj in fused_aromatic_pairs(graph):
        atoms = set(graph.rings[ri]) | set(graph.rings[rj])
        if any(graph.atoms[i].element in ("N", "O", "S") for i in atoms):
            return True
    return False
