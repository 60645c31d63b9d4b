"""Seeded random molecule builder and the bundled two-class corpus.

Molecules are grown as Kekule graphs with explicit valence bookkeeping, so
every rendered string parses. The corpus has an oxygen/carbon class
("ether") and a nitrogen/sulfur-heavy class ("amine") with cleanly
separable descriptor distributions.
"""
from __future__ import annotations

import numpy as np

from smigan.chem import MolecularGraph, canonicalize, parse, render_smiles, tokenize
from smigan.chem.parser import Atom, Bond, allowed_valences

CLASS_NAMES = ("ether", "amine")

# (element, charge) -> working valence used while growing
def _capacity(element: str, charge: int = 0) -> int:
    options = allowed_valences(element, charge)
    return options[0] if options else 0


class _Builder:
    def __init__(self, rng: np.random.Generator):
        self.rng = rng
        self.atoms: list[Atom] = []
        self.bonds: list[Bond] = []
        self.used: list[int] = []  # bond order sum per atom

    def free(self, idx: int) -> int:
        return _capacity(self.atoms[idx].element, self.atoms[idx].charge) - self.used[idx]

    def add_atom(self, element: str, charge: int = 0) -> int:
        self.atoms.append(Atom(element=element, charge=charge))
        self.used.append(0)
        return len(self.atoms) - 1

    def add_bond(self, a: int, b: int, order: int) -> None:
        self.bonds.append(Bond(a, b, order))
        self.used[a] += order
        self.used[b] += order

    def bonded(self, a: int, b: int) -> bool:
        return any({x.a, x.b} == {a, b} for x in self.bonds)

    def attach(self, host: int, element: str, order: int = 1) -> int:
        idx = self.add_atom(element)
        self.add_bond(host, idx, order)
        return idx

    def ring_template(self, kind: str, host: int | None) -> None:
        """Insert an aromatic (Kekule) or plain ring, optionally bonded to host."""
        if kind == "benzene":
            members = ["C"] * 6
            orders = [2, 1, 2, 1, 2, 1]
        elif kind == "pyridine":
            members = ["N", "C", "C", "C", "C", "C"]
            orders = [2, 1, 2, 1, 2, 1]
        elif kind == "pyrrole":
            members = ["N", "C", "C", "C", "C"]
            orders = [1, 2, 1, 2, 1]
        elif kind == "furan":
            members = ["O", "C", "C", "C", "C"]
            orders = [1, 2, 1, 2, 1]
        elif kind == "thiophene":
            members = ["S", "C", "C", "C", "C"]
            orders = [1, 2, 1, 2, 1]
        elif kind == "cyclohexane":
            members = ["C"] * 6
            orders = [1] * 6
        elif kind == "cyclopentane":
            members = ["C"] * 5
            orders = [1] * 5
        elif kind == "macrocycle":
            size = int(self.rng.integers(13, 17))
            members = ["C"] * size
            orders = [1] * size
        else:
            raise ValueError(kind)
        idxs = [self.add_atom(e) for e in members]
        n = len(idxs)
        for i in range(n):
            self.add_bond(idxs[i], idxs[(i + 1) % n], orders[i])
        if host is not None:
            carbons = [i for i in idxs if self.atoms[i].element == "C" and self.free(i) >= 1]
            if carbons and self.free(host) >= 1:
                pick = carbons[int(self.rng.integers(len(carbons)))]
                self.add_bond(host, pick, 1)

    def graph(self) -> MolecularGraph:
        g = MolecularGraph(atoms=self.atoms, bonds=self.bonds)
        for idx, atom in enumerate(g.atoms):
            options = allowed_valences(atom.element, atom.charge)
            fill = next((v for v in options if v >= self.used[idx]), None)
            atom.hydrogens = (fill - self.used[idx]) if fill is not None else 0
        return g


def random_molecule(
    rng: np.random.Generator,
    chain_elements: tuple[str, ...] = ("C", "C", "C", "N", "O", "S"),
    rings: tuple[str, ...] = ("benzene", "pyridine", "furan", "cyclohexane"),
    n_heavy: tuple[int, int] = (8, 16),
    ring_prob: float = 0.6,
    double_prob: float = 0.12,
    halogen_prob: float = 0.0,
    charge_prob: float = 0.0,
    macrocycle_prob: float = 0.0,
) -> MolecularGraph:
    """Grow a random valence-correct molecule; returns the perceived graph."""
    b = _Builder(rng)
    target = int(rng.integers(n_heavy[0], n_heavy[1] + 1))

    if macrocycle_prob > 0 and rng.random() < macrocycle_prob:
        b.ring_template("macrocycle", None)
    elif rings and rng.random() < ring_prob:
        b.ring_template(rings[int(rng.integers(len(rings)))], None)
    else:
        b.add_atom(chain_elements[int(rng.integers(len(chain_elements)))])

    while len(b.atoms) < target:
        hosts = [i for i in range(len(b.atoms)) if b.free(i) >= 1]
        if not hosts:
            break
        host = hosts[int(rng.integers(len(hosts)))]
        roll = rng.random()
        if rings and roll < 0.12:
            b.ring_template(rings[int(rng.integers(len(rings)))], host)
            continue
        element = chain_elements[int(rng.integers(len(chain_elements)))]
        order = 1
        if (rng.random() < double_prob and b.free(host) >= 2
                and _capacity(element) >= 2):
            order = 2
        b.attach(host, element, order)

    if halogen_prob > 0:
        for idx in range(len(b.atoms)):
            if (b.atoms[idx].element == "C" and not b.atoms[idx].aromatic
                    and b.free(idx) >= 1 and rng.random() < halogen_prob):
                b.attach(idx, ["F", "Cl", "Br"][int(rng.integers(3))])

    if charge_prob > 0 and rng.random() < charge_prob:
        singles = [i for i in range(len(b.atoms))
                   if b.atoms[i].element == "O" and b.used[i] == 1]
        if singles:
            pick = singles[int(rng.integers(len(singles)))]
            b.atoms[pick].charge = -1

    built = b.graph()
    order = rng.permutation(len(built.atoms)).tolist()
    return parse(render_smiles(built, order))


_CLASS_RECIPES = {
    "ether": dict(
        chain_elements=("C", "C", "C", "C", "O", "O"),
        rings=("benzene", "furan", "cyclohexane", "cyclopentane"),
        double_prob=0.08,
    ),
    "amine": dict(
        chain_elements=("C", "C", "N", "N", "S"),
        rings=("pyridine", "pyrrole", "thiophene", "benzene"),
        double_prob=0.08,
    ),
}

# keeps the classes separable: ether carries no N/S, amine must carry some
_CLASS_KEEP = {
    "ether": lambda g: all(a.element not in ("N", "S") for a in g.atoms),
    "amine": lambda g: any(a.element in ("N", "S") for a in g.atoms),
}


def synthetic_corpus(
    seed: int,
    n_per_class: tuple[int, int] = (120, 120),
    min_tokens: int = 10,
    max_tokens: int = 80,
    n_heavy: tuple[int, int] = (8, 16),
) -> list[tuple[str, str]]:
    """Deterministic (label, canonical SMILES) rows, deduplicated per class."""
    rows: list[tuple[str, str]] = []
    for ci, name in enumerate(CLASS_NAMES):
        rng = np.random.default_rng(np.random.SeedSequence((seed, 7001, ci)))
        recipe = _CLASS_RECIPES[name]
        seen: set[str] = set()
        out: list[str] = []
        attempts = 0
        while len(out) < n_per_class[ci] and attempts < n_per_class[ci] * 200:
            attempts += 1
            graph = random_molecule(rng, n_heavy=n_heavy, **recipe)
            if not _CLASS_KEEP[name](graph):
                continue
            smiles = canonicalize(graph)
            if not (min_tokens <= len(tokenize(smiles)) <= max_tokens):
                continue
            if smiles in seen:
                continue
            seen.add(smiles)
            out.append(smiles)
        if len(out) < n_per_class[ci]:
            raise RuntimeError(f"could not build {n_per_class[ci]} molecules for {name}")
        rows.extend((name, s) for s in out)
    return rows


def write_corpus(path: str, rows: list[tuple[str, str]]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("label,smiles\n")
        for label, smiles in rows:
            fh.write(f"{label},{smiles}\n")


def fuzz_molecules(seed: int, count: int, max_heavy: int = 16) -> list[MolecularGraph]:
    """Diverse fuzz corpus for property tests (aromatics, halogens, charges,
    occasional macrocycles)."""
    rng = np.random.default_rng(np.random.SeedSequence((seed, 7002)))
    out = []
    while len(out) < count:
        graph = random_molecule(
            rng,
            chain_elements=("C", "C", "C", "N", "O", "S", "P"),
            rings=("benzene", "pyridine", "pyrrole", "furan", "thiophene",
                   "cyclohexane", "cyclopentane"),
            n_heavy=(3, max_heavy),
            ring_prob=0.5,
            double_prob=0.15,
            halogen_prob=0.08,
            charge_prob=0.15,
            macrocycle_prob=0.04,
        )
        if graph.heavy_atom_count() <= max_heavy:
            out.append(graph)
    return out
