"""Valence-checked SMILES parsing into a molecular graph.

The parser builds an atom/bond graph, perceives rings (smallest set of
smallest rings) and aromaticity, assigns implicit hydrogens, and rejects
anything that violates the valence table. Stereochemistry markers and
isotope digits are accepted and discarded.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

from smigan.errors import SmiganError
from smigan.chem.tokens import Token, TokenKind, tokenize, EmptyInput

AROMATIC_BOND = 4  # sentinel order for perceived aromatic bonds

# Elements legal as bare (unbracketed) atoms.
ORGANIC_SUBSET = {"B", "C", "N", "O", "P", "S", "F", "Cl", "Br", "I"}

# Periodic-table symbols the bracket parser recognizes. Elements outside the
# valence table below parse permissively (no valence check, no implicit H).
KNOWN_ELEMENTS = {
    "H", "He", "Li", "Be", "B", "C", "N", "O", "F", "Ne", "Na", "Mg", "Al",
    "Si", "P", "S", "Cl", "Ar", "K", "Ca", "Sc", "Ti", "V", "Cr", "Mn", "Fe",
    "Co", "Ni", "Cu", "Zn", "Ga", "Ge", "As", "Se", "Br", "Kr", "Rb", "Sr",
    "Y", "Zr", "Nb", "Mo", "Tc", "Ru", "Rh", "Pd", "Ag", "Cd", "In", "Sn",
    "Sb", "Te", "I", "Xe", "Cs", "Ba", "La", "Ce", "Pr", "Nd", "Pm", "Sm",
    "Eu", "Gd", "Tb", "Dy", "Ho", "Er", "Tm", "Yb", "Lu", "Hf", "Ta", "W",
    "Re", "Os", "Ir", "Pt", "Au", "Hg", "Tl", "Pb", "Bi", "Po", "At", "Rn",
    "Fr", "Ra", "Ac", "Th", "Pa", "U",
}

_BASE_VALENCES = {
    "H": (1,),
    "B": (3,),
    "C": (4,),
    "N": (3,),
    "O": (2,),
    "F": (1,),
    "P": (3, 5),
    "S": (2, 4, 6),
    "Cl": (1,),
    "Br": (1,),
    "I": (1,),
}

ATOMIC_MASS = {
    "H": 1.008, "B": 10.81, "C": 12.011, "N": 14.007, "O": 15.999,
    "F": 18.998, "P": 30.974, "S": 32.06, "Cl": 35.45, "Br": 79.904,
    "I": 126.904,
}

HALOGENS = {"F", "Cl", "Br", "I"}


class ParseError(SmiganError):
    pass


class UnclosedRing(ParseError):
    def __init__(self, label: int):
        super().__init__(f"ring label {label} opened but never closed")
        self.label = label


class UnbalancedBranch(ParseError):
    pass


class ValenceViolation(ParseError):
    def __init__(self, atom_index: int, message: str):
        super().__init__(f"atom {atom_index}: {message}")
        self.atom_index = atom_index


class SyntaxViolation(ParseError):
    pass


class AromaticityError(ParseError):
    pass


@dataclass
class Atom:
    element: str
    charge: int = 0
    aromatic: bool = False
    hydrogens: int = 0


@dataclass
class Bond:
    a: int
    b: int
    order: int  # 1, 2, 3, or AROMATIC_BOND after perception

    def other(self, idx: int) -> int:
        return self.b if idx == self.a else self.a


@dataclass
class MolecularGraph:
    atoms: list[Atom] = field(default_factory=list)
    bonds: list[Bond] = field(default_factory=list)
    rings: list[list[int]] = field(default_factory=list)  # SSSR, ordered cycles
    ring_aromatic: list[bool] = field(default_factory=list)

    def neighbors(self, idx: int) -> list[tuple[int, Bond]]:
        out = []
        for bond in self.bonds:
            if bond.a == idx or bond.b == idx:
                out.append((bond.other(idx), bond))
        return out

    def heavy_atom_count(self) -> int:
        return sum(1 for a in self.atoms if a.element != "H")


def allowed_valences(element: str, charge: int) -> tuple[int, ...]:
    """Allowed total valences for an element at a formal charge.

    Charge shifts follow the usual electron-count rules: cations of N/O/S/P
    and halogens gain a bond, anions lose one; carbon loses one either way;
    borate (B-) gains one.
    """
    base = _BASE_VALENCES.get(element)
    if base is None:
        return ()
    if charge == 0:
        return base
    if element == "C":
        return (max(0, 4 - abs(charge)),)
    if element == "B":
        return (4,) if charge == -1 else (max(0, 3 - abs(charge)),)
    # N, O, S, P, halogens: one bond per unit of positive charge, minus for negative
    shifted = tuple(max(0, v + charge) for v in base)
    return tuple(sorted(set(shifted)))


_BRACKET_RE = re.compile(
    r"""^\[
        (?P<isotope>[0-9]{1,3})?
        (?P<element>[A-Z][a-z]?|[bcnops])
        (?P<chiral>@{1,2})?
        (?P<hcount>H[0-9]*)?
        (?P<charge>\+\+|--|[+-][0-9]*)?
        (?::[0-9]+)?
    \]$""",
    re.VERBOSE,
)


def _parse_bracket(text: str) -> Atom:
    m = _BRACKET_RE.match(text)
    if m is None:
        raise SyntaxViolation(f"malformed bracket atom {text!r}")
    symbol = m.group("element")
    aromatic = symbol.islower()
    element = symbol.capitalize() if aromatic else symbol
    if element not in KNOWN_ELEMENTS:
        raise SyntaxViolation(f"unknown element {element!r} in {text!r}")
    h = 0
    if m.group("hcount"):
        digits = m.group("hcount")[1:]
        h = int(digits) if digits else 1
    charge = 0
    if m.group("charge"):
        c = m.group("charge")
        if c in ("++", "--"):
            charge = 2 if c == "++" else -2
        elif len(c) == 1:
            charge = 1 if c == "+" else -1
        else:
            charge = int(c[1:]) * (1 if c[0] == "+" else -1)
        if abs(charge) > 2:
            raise SyntaxViolation(f"charge magnitude above 2 in {text!r}")
    return Atom(element=element, charge=charge, aromatic=aromatic, hydrogens=h)


_BOND_ORDER = {"-": 1, "=": 2, "#": 3, "/": 1, "\\": 1}


def parse(source: str | list[Token]) -> MolecularGraph:
    """Parse SMILES text or a token list into a checked MolecularGraph.

    Raises EmptyInput, UnclosedRing, UnbalancedBranch, ValenceViolation,
    SyntaxViolation, or AromaticityError. The returned graph has implicit
    hydrogens filled, SSSR rings perceived, and aromatic rings flagged.
    """
    tokens = tokenize(source) if isinstance(source, str) else source
    if not tokens:
        raise EmptyInput("no tokens to parse")

    graph = MolecularGraph()
    bracket_h: dict[int, bool] = {}   # atom index -> H count was explicit
    prev: int | None = None
    pending: int | None = None        # explicit bond order awaiting its atom
    pending_arom = False              # ':' seen
    branch_stack: list[int | None] = []
    open_rings: dict[int, tuple[int, int | None, bool]] = {}
    aromatic_claims: set[int] = set()  # bonds written with ':'

    def add_bond(a: int, b: int, order: int | None, arom_claim: bool) -> None:
        if a == b:
            raise SyntaxViolation("ring closure bonds an atom to itself")
        for bond in graph.bonds:
            if {bond.a, bond.b} == {a, b}:
                raise SyntaxViolation(f"duplicate bond between atoms {a} and {b}")
        graph.bonds.append(Bond(a, b, order if order is not None else 1))
        if arom_claim:
            aromatic_claims.add(len(graph.bonds) - 1)

    def attach(idx: int) -> None:
        nonlocal prev, pending, pending_arom
        if prev is not None:
            add_bond(prev, idx, pending, pending_arom)
        elif pending is not None or pending_arom:
            raise SyntaxViolation("bond symbol with no preceding atom")
        prev = idx
        pending = None
        pending_arom = False

    for tok in tokens:
        if tok.kind is TokenKind.ATOM:
            sym = tok.text
            aromatic = sym.islower()
            element = sym.capitalize() if aromatic else sym
            if element not in ORGANIC_SUBSET:
                raise SyntaxViolation(f"{sym!r} not valid outside brackets")
            graph.atoms.append(Atom(element=element, aromatic=aromatic))
            attach(len(graph.atoms) - 1)
        elif tok.kind is TokenKind.BRACKET:
            atom = _parse_bracket(tok.text)
            graph.atoms.append(atom)
            bracket_h[len(graph.atoms) - 1] = True
            attach(len(graph.atoms) - 1)
        elif tok.kind is TokenKind.BOND:
            if tok.text == ":":
                if pending is not None or pending_arom:
                    raise SyntaxViolation("consecutive bond symbols")
                pending_arom = True
            else:
                if pending is not None or pending_arom:
                    raise SyntaxViolation("consecutive bond symbols")
                pending = _BOND_ORDER[tok.text]
        elif tok.kind is TokenKind.RING:
            if prev is None:
                raise SyntaxViolation("ring label before any atom")
            label = tok.ring_label
            if label in open_rings:
                other, other_order, other_arom = open_rings.pop(label)
                order = pending if pending is not None else other_order
                if (pending is not None and other_order is not None
                        and pending != other_order):
                    raise SyntaxViolation(f"conflicting bond orders on ring {label}")
                add_bond(other, prev, order, pending_arom or other_arom)
            else:
                open_rings[label] = (prev, pending, pending_arom)
            pending = None
            pending_arom = False
        elif tok.kind is TokenKind.BRANCH_OPEN:
            if prev is None:
                raise UnbalancedBranch("branch opened before any atom")
            if pending is not None or pending_arom:
                raise SyntaxViolation("bond symbol before branch open")
            branch_stack.append(prev)
        elif tok.kind is TokenKind.BRANCH_CLOSE:
            if not branch_stack:
                raise UnbalancedBranch("branch closed without matching open")
            if pending is not None or pending_arom:
                raise SyntaxViolation("dangling bond before branch close")
            prev = branch_stack.pop()
        elif tok.kind is TokenKind.DOT:
            if prev is None:
                raise SyntaxViolation("empty fragment before '.'")
            if pending is not None or pending_arom:
                raise SyntaxViolation("bond symbol before '.'")
            prev = None
        else:
            raise SyntaxViolation(f"unexpected token {tok.text!r}")

    if pending is not None or pending_arom:
        raise SyntaxViolation("dangling bond at end of input")
    if tokens[-1].kind is TokenKind.DOT:
        raise SyntaxViolation("empty fragment after trailing '.'")
    if branch_stack:
        raise UnbalancedBranch("unclosed branch at end of input")
    if open_rings:
        raise UnclosedRing(sorted(open_rings)[0])
    if not graph.atoms:
        raise EmptyInput("no atoms parsed")

    graph.rings = _sssr(graph)
    _assign_hydrogens(graph, bracket_h)
    _check_valences(graph)
    _perceive_aromaticity(graph, aromatic_claims)
    return graph


# --- ring perception -------------------------------------------------------

def _adjacency(graph: MolecularGraph) -> list[list[tuple[int, int]]]:
    adj: list[list[tuple[int, int]]] = [[] for _ in graph.atoms]
    for bi, bond in enumerate(graph.bonds):
        adj[bond.a].append((bond.b, bi))
        adj[bond.b].append((bond.a, bi))
    return adj


def _components(graph: MolecularGraph) -> int:
    seen = [False] * len(graph.atoms)
    adj = _adjacency(graph)
    count = 0
    for start in range(len(graph.atoms)):
        if seen[start]:
            continue
        count += 1
        stack = [start]
        seen[start] = True
        while stack:
            u = stack.pop()
            for v, _ in adj[u]:
                if not seen[v]:
                    seen[v] = True
                    stack.append(v)
    return count


def _sssr(graph: MolecularGraph) -> list[list[int]]:
    """Smallest set of smallest rings via shortest-cycle candidates.

    For each bond, find the shortest cycle through it (BFS with the bond
    removed), then greedily keep cycles in increasing length while they are
    independent over GF(2) on bond incidence, until the cycle-space rank
    E - V + C is filled.
    """
    rank = len(graph.bonds) - len(graph.atoms) + _components(graph)
    if rank <= 0:
        return []
    adj = _adjacency(graph)
    candidates: list[tuple[int, int, list[int]]] = []  # (length, bond idx, atom cycle)
    for bi, bond in enumerate(graph.bonds):
        path = _shortest_path(adj, bond.a, bond.b, skip_bond=bi)
        if path is not None:
            candidates.append((len(path), bi, path))
    candidates.sort(key=lambda c: (c[0], c[1]))

    basis: list[int] = []  # xor-reduced bond bitmasks
    rings: list[list[int]] = []
    for _, _, cycle in candidates:
        mask = _cycle_bond_mask(graph, cycle)
        reduced = mask
        for b in basis:
            reduced = min(reduced, reduced ^ b)
        if reduced:
            basis.append(reduced)
            rings.append(cycle)
            if len(rings) == rank:
                break
    return rings


def _shortest_path(adj, src: int, dst: int, skip_bond: int) -> list[int] | None:
    from collections import deque

    prev = {src: None}
    queue = deque([src])
    while queue:
        u = queue.popleft()
        if u == dst:
            path = []
            node = dst
            while node is not None:
                path.append(node)
                node = prev[node]
            return path[::-1]
        for v, bi in adj[u]:
            if bi == skip_bond or v in prev:
                continue
            prev[v] = u
            queue.append(v)
    return None


def _cycle_bond_mask(graph: MolecularGraph, cycle: list[int]) -> int:
    mask = 0
    pairs = {frozenset((cycle[i], cycle[(i + 1) % len(cycle)])) for i in range(len(cycle))}
    for bi, bond in enumerate(graph.bonds):
        if frozenset((bond.a, bond.b)) in pairs:
            mask |= 1 << bi
    return mask


def ring_bond_indices(graph: MolecularGraph, ring: list[int]) -> list[int]:
    pairs = {frozenset((ring[i], ring[(i + 1) % len(ring)])) for i in range(len(ring))}
    return [bi for bi, bond in enumerate(graph.bonds)
            if frozenset((bond.a, bond.b)) in pairs]


def bridge_bonds(graph: MolecularGraph) -> set[int]:
    """Bond indices that are bridges (in no cycle); used for rotatable bonds."""
    adj = _adjacency(graph)
    n = len(graph.atoms)
    disc = [-1] * n
    low = [0] * n
    bridges: set[int] = set()
    timer = 0

    for root in range(n):
        if disc[root] != -1:
            continue
        stack = [(root, -1, iter(adj[root]))]
        disc[root] = low[root] = timer
        timer += 1
        while stack:
            u, pbond, it = stack[-1]
            advanced = False
            for v, bi in it:
                if bi == pbond:
                    continue
                if disc[v] == -1:
                    disc[v] = low[v] = timer
                    timer += 1
                    stack.append((v, bi, iter(adj[v])))
                    advanced = True
                    break
                low[u] = min(low[u], disc[v])
            if not advanced:
                stack.pop()
                if stack:
                    parent = stack[-1][0]
                    low[parent] = min(low[parent], low[u])
                    if low[u] > disc[parent]:
                        bridges.add(pbond)
    return bridges


# --- hydrogens, valence, aromaticity --------------------------------------

def _aromatic_pi_need(atom: Atom, degree: int) -> int:
    """1 if a lowercase aromatic atom needs a ring double bond, else 0."""
    if atom.element == "C":
        return 1
    if atom.element in ("N", "P"):
        if atom.charge > 0:
            return 1
        return 0 if (atom.hydrogens > 0 or degree >= 3) else 1
    return 0  # O, S: lone-pair donors


def _assign_hydrogens(graph: MolecularGraph, bracket_h: dict[int, bool]) -> None:
    for idx, atom in enumerate(graph.atoms):
        if idx in bracket_h:
            continue  # bracket atoms carry their stated H count
        neighbors = graph.neighbors(idx)
        if atom.aromatic:
            used = len(neighbors) + _aromatic_pi_need(atom, len(neighbors))
        else:
            used = sum(bond.order for _, bond in neighbors)
        options = allowed_valences(atom.element, atom.charge)
        fill = next((v for v in options if v >= used), None)
        atom.hydrogens = (fill - used) if fill is not None else 0


def _check_valences(graph: MolecularGraph) -> None:
    for idx, atom in enumerate(graph.atoms):
        options = allowed_valences(atom.element, atom.charge)
        if not options:
            continue  # element outside the valence table: permissive
        neighbors = graph.neighbors(idx)
        if atom.aromatic:
            used = len(neighbors) + _aromatic_pi_need(atom, len(neighbors))
        else:
            used = sum(bond.order for _, bond in neighbors)
        total = used + atom.hydrogens
        if total > max(options):
            sym = f"{atom.element}{atom.charge:+d}" if atom.charge else atom.element
            raise ValenceViolation(
                idx, f"{sym} valence {total} exceeds allowed {max(options)}")


def ring_pi_electrons(graph: MolecularGraph, ring: list[int]) -> int | None:
    """Pi-electron count of a ring, or None if any member is not sp2-capable.

    Lowercase-aromatic atoms contribute via the standard table (C 1;
    pyridine-type N 1; pyrrole-type N, O, S 2). Kekule atoms contribute 1
    when they hold a double bond to another atom inside the same fused ring
    system, 2 when they are N/O/S lone-pair donors with only single bonds,
    and otherwise block perception (including exocyclic double bonds and
    triple bonds).
    """
    system = _ring_system_atoms(graph, ring)
    total = 0
    for idx in ring:
        atom = graph.atoms[idx]
        neighbors = graph.neighbors(idx)
        if atom.aromatic:
            total += 1 if _aromatic_pi_need(atom, len(neighbors)) else 2
            continue
        doubles = [(n, b) for n, b in neighbors if b.order == 2]
        triples = [b for _, b in neighbors if b.order == 3]
        if triples:
            return None
        if doubles:
            if any(n in system for n, _ in doubles):
                total += 1
            else:
                return None  # exocyclic double bond
        elif atom.element in ("N", "O", "S", "P") and atom.charge <= 0:
            total += 2
        else:
            return None
    return total


def _ring_system_atoms(graph: MolecularGraph, ring: list[int]) -> set[int]:
    """Atoms of all SSSR rings transitively sharing atoms with this ring."""
    system = set(ring)
    changed = True
    while changed:
        changed = False
        for other in graph.rings:
            o = set(other)
            if o & system and not o <= system:
                system |= o
                changed = True
    return system


def _perceive_aromaticity(graph: MolecularGraph, aromatic_claims: set[int]) -> None:
    input_aromatic = {i for i, a in enumerate(graph.atoms) if a.aromatic}
    flags = [False] * len(graph.rings)
    changed = True
    while changed:
        changed = False
        for ri, ring in enumerate(graph.rings):
            if flags[ri]:
                continue
            pi = ring_pi_electrons(graph, ring)
            if pi is not None and pi >= 2 and (pi - 2) % 4 == 0:
                flags[ri] = True
                changed = True
                for bi in ring_bond_indices(graph, ring):
                    graph.bonds[bi].order = AROMATIC_BOND
                for idx in ring:
                    graph.atoms[idx].aromatic = True
    graph.ring_aromatic = flags

    aromatic_ring_atoms: set[int] = set()
    for ring, is_arom in zip(graph.rings, flags):
        if is_arom:
            aromatic_ring_atoms.update(ring)
    for idx in sorted(input_aromatic):
        if idx not in aromatic_ring_atoms:
            raise AromaticityError(
                f"atom {idx} written aromatic but no aromatic ring contains it")
    for bi in sorted(aromatic_claims):
        if graph.bonds[bi].order != AROMATIC_BOND:
            raise AromaticityError(
                f"bond {bi} written ':' but is not part of an aromatic ring")


def antiaromatic_rings(graph: MolecularGraph) -> list[list[int]]:
    """Rings whose members are all sp2-capable with a 4n pi count (n >= 1)."""
    out = []
    for ring, is_arom in zip(graph.rings, graph.ring_aromatic):
        if is_arom:
            continue
        pi = ring_pi_electrons(graph, ring)
        if pi is not None and pi >= 4 and pi % 4 == 0:
            out.append(ring)
    return out


def connected_components(graph: MolecularGraph) -> list[list[int]]:
    adj = _adjacency(graph)
    seen = [False] * len(graph.atoms)
    comps = []
    for start in range(len(graph.atoms)):
        if seen[start]:
            continue
        comp = [start]
        seen[start] = True
        stack = [start]
        while stack:
            u = stack.pop()
            for v, _ in adj[u]:
                if not seen[v]:
                    seen[v] = True
                    comp.append(v)
                    stack.append(v)
        comps.append(sorted(comp))
    return comps


def subgraph(graph: MolecularGraph, atom_indices: list[int]) -> MolecularGraph:
    """Induced subgraph with atoms reindexed; rings and aromaticity recomputed."""
    index = {old: new for new, old in enumerate(atom_indices)}
    sub = MolecularGraph()
    sub.atoms = [Atom(graph.atoms[i].element, graph.atoms[i].charge,
                      graph.atoms[i].aromatic, graph.atoms[i].hydrogens)
                 for i in atom_indices]
    for bond in graph.bonds:
        if bond.a in index and bond.b in index:
            sub.bonds.append(Bond(index[bond.a], index[bond.b], bond.order))
    sub.rings = _sssr(sub)
    sub.ring_aromatic = []
    for ring in sub.rings:
        pi = ring_pi_electrons(sub, ring)
        sub.ring_aromatic.append(pi is not None and pi >= 2 and (pi - 2) % 4 == 0)
    return sub
