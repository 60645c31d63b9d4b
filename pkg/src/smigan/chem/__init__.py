"""SMILES tokenization, parsing, canonicalization, and fingerprints."""

from smigan.chem.tokens import (
    EmptyInput,
    Token,
    TokenKind,
    TokenizeError,
    UnknownCharacter,
    detokenize,
    tokenize,
)
from smigan.chem.parser import (
    AROMATIC_BOND,
    ATOMIC_MASS,
    AromaticityError,
    Atom,
    Bond,
    HALOGENS,
    MolecularGraph,
    ParseError,
    SyntaxViolation,
    UnbalancedBranch,
    UnclosedRing,
    ValenceViolation,
    antiaromatic_rings,
    bridge_bonds,
    connected_components,
    parse,
    ring_pi_electrons,
    subgraph,
)
from smigan.chem.canon import canonicalize, render_smiles
from smigan.chem.fingerprint import Fingerprint, WidthMismatch, fingerprint, tanimoto

__all__ = [
    "AROMATIC_BOND", "ATOMIC_MASS", "AromaticityError", "Atom", "Bond",
    "EmptyInput", "Fingerprint", "HALOGENS", "MolecularGraph", "ParseError",
    "SyntaxViolation", "Token", "TokenKind", "TokenizeError",
    "UnbalancedBranch", "UnclosedRing", "UnknownCharacter",
    "ValenceViolation", "WidthMismatch", "antiaromatic_rings", "bridge_bonds",
    "canonicalize", "connected_components", "detokenize", "fingerprint",
    "parse", "render_smiles", "ring_pi_electrons", "subgraph", "tanimoto",
    "tokenize",
]
