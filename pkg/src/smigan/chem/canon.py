"""Canonical SMILES output.

Atom ranking uses Morgan-style iterative refinement over
(element, charge, H count, degree, aromatic) invariants. Remaining ties are
broken by promoting each tied candidate in turn and keeping the
lexicographically smallest rendered string, which makes the output
independent of input atom order.
"""
from __future__ import annotations

from smigan.chem.parser import (
    AROMATIC_BOND,
    Atom,
    MolecularGraph,
    ORGANIC_SUBSET,
    _aromatic_pi_need,
    allowed_valences,
)

_BOND_SYMBOL = {1: "", 2: "=", 3: "#", AROMATIC_BOND: ""}


def canonicalize(graph: MolecularGraph) -> str:
    """Unique SMILES rendering, invariant under permutation of atom input order."""
    ranks = _refine(graph, _initial_ranks(graph))
    return _canon_min(graph, ranks)


def render_smiles(graph: MolecularGraph, priority: list[int]) -> str:
    """Render with an arbitrary atom priority; used to produce alternative
    (non-canonical) but valid renderings of the same molecule."""
    return _render(graph, priority)


def _initial_ranks(graph: MolecularGraph) -> list[int]:
    degree = [0] * len(graph.atoms)
    for bond in graph.bonds:
        degree[bond.a] += 1
        degree[bond.b] += 1
    keys = [
        (a.element, degree[i], a.charge, a.hydrogens, a.aromatic)
        for i, a in enumerate(graph.atoms)
    ]
    return _dense(keys)


def _dense(keys: list) -> list[int]:
    order = {k: r for r, k in enumerate(sorted(set(keys)))}
    return [order[k] for k in keys]


def _refine(graph: MolecularGraph, ranks: list[int]) -> list[int]:
    adj: list[list[tuple[int, int]]] = [[] for _ in graph.atoms]
    for bond in graph.bonds:
        adj[bond.a].append((bond.order, bond.b))
        adj[bond.b].append((bond.order, bond.a))
    while True:
        keys = [
            (ranks[i], tuple(sorted((o, ranks[j]) for o, j in adj[i])))
            for i in range(len(graph.atoms))
        ]
        new = _dense(keys)
        if len(set(new)) == len(set(ranks)):
            return new
        ranks = new


def _canon_min(graph: MolecularGraph, ranks: list[int]) -> str:
    counts: dict[int, int] = {}
    for r in ranks:
        counts[r] = counts.get(r, 0) + 1
    tied = sorted(r for r, c in counts.items() if c > 1)
    if not tied:
        return _render(graph, ranks)
    target = tied[0]
    best: str | None = None
    for cand in [i for i, r in enumerate(ranks) if r == target]:
        seed = [2 * r + 1 for r in ranks]
        seed[cand] -= 1
        refined = _refine(graph, _dense(seed))
        s = _canon_min(graph, refined)
        if best is None or s < best:
            best = s
    return best


def _inferred_hydrogens(atom: Atom, degree: int, order_sum: int) -> int | None:
    """H count a reader would assign to this atom written bare."""
    probe = Atom(atom.element, atom.charge, atom.aromatic, 0)
    used = degree + _aromatic_pi_need(probe, degree) if atom.aromatic else order_sum
    options = allowed_valences(atom.element, atom.charge)
    fill = next((v for v in options if v >= used), None)
    return None if fill is None else fill - used


def _atom_text(graph: MolecularGraph, idx: int) -> str:
    atom = graph.atoms[idx]
    neighbors = graph.neighbors(idx)
    degree = len(neighbors)
    order_sum = sum(1 if b.order == AROMATIC_BOND else b.order for _, b in neighbors)
    symbol = atom.element.lower() if atom.aromatic else atom.element
    bare_ok = (
        atom.element in ORGANIC_SUBSET
        and atom.charge == 0
        and _inferred_hydrogens(atom, degree, order_sum) == atom.hydrogens
    )
    if bare_ok:
        return symbol
    h = "" if atom.hydrogens == 0 else ("H" if atom.hydrogens == 1 else f"H{atom.hydrogens}")
    if atom.charge == 0:
        q = ""
    elif abs(atom.charge) == 1:
        q = "+" if atom.charge > 0 else "-"
    else:
        q = f"{atom.charge:+d}"
    return f"[{symbol}{h}{q}]"


def _ring_digit(d: int) -> str:
    return str(d) if d < 10 else f"%{d:02d}"


def _render(graph: MolecularGraph, priority: list[int]) -> str:
    if not graph.atoms:
        raise ValueError("cannot render an empty graph")
    adj: list[list[tuple[int, int]]] = [[] for _ in graph.atoms]
    for bi, bond in enumerate(graph.bonds):
        adj[bond.a].append((bond.b, bi))
        adj[bond.b].append((bond.a, bi))
    for lst in adj:
        lst.sort(key=lambda vb: (priority[vb[0]], vb[0]))

    visited = [False] * len(graph.atoms)
    used_bond = [False] * len(graph.bonds)
    children: list[list[tuple[int, int]]] = [[] for _ in graph.atoms]
    closures: list[list[int]] = [[] for _ in graph.atoms]  # bond indices
    preorder: list[int] = []
    roots: list[int] = []

    def visit(u: int) -> None:
        visited[u] = True
        preorder.append(u)
        for v, bi in adj[u]:
            if used_bond[bi]:
                continue
            used_bond[bi] = True
            if visited[v]:
                closures[u].append(bi)
                closures[v].append(bi)
            else:
                children[u].append((v, bi))
                visit(v)

    order_all = sorted(range(len(graph.atoms)), key=lambda i: (priority[i], i))
    for root in order_all:
        if not visited[root]:
            roots.append(root)
            visit(root)

    # assign ring-closure digits in emission (pre-order) order
    emit_pos = {a: p for p, a in enumerate(preorder)}
    digit_of: dict[int, int] = {}
    open_digits: set[int] = set()
    closure_text: dict[tuple[int, int], str] = {}  # (atom, bond) -> text
    for u in preorder:
        for bi in closures[u]:
            bond = graph.bonds[bi]
            other = bond.other(u)
            if bi not in digit_of:
                d = 1
                while d in open_digits:
                    d += 1
                if d > 99:
                    raise ValueError("more than 99 concurrently open rings")
                digit_of[bi] = d
                open_digits.add(d)
                closure_text[(u, bi)] = _BOND_SYMBOL[bond.order] + _ring_digit(d)
            else:
                closure_text[(u, bi)] = _ring_digit(digit_of[bi])
                if emit_pos[other] < emit_pos[u]:
                    open_digits.discard(digit_of[bi])

    def emit(u: int) -> str:
        parts = [_atom_text(graph, u)]
        for bi in closures[u]:
            parts.append(closure_text[(u, bi)])
        kids = children[u]
        for i, (v, bi) in enumerate(kids):
            sub = _BOND_SYMBOL[graph.bonds[bi].order] + emit(v)
            parts.append(f"({sub})" if i < len(kids) - 1 else sub)
        return "".join(parts)

    return ".".join(emit(r) for r in roots)
