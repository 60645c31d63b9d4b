"""SMILES tokenization.

Tokens cover the input exactly: joining their texts in order reproduces the
source string. Two-character halogens (Cl, Br) and whole bracket expressions
are single tokens.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum

from smigan.errors import SmiganError


class TokenKind(Enum):
    ATOM = "atom"            # bare organic-subset atom, possibly aromatic lowercase
    BRACKET = "bracket"      # full [...] atom expression
    BOND = "bond"            # - = # : / \
    BRANCH_OPEN = "("
    BRANCH_CLOSE = ")"
    RING = "ring"            # single digit or %nn ring-closure label
    DOT = "."
    START = "start"          # reserved class start tokens; never emitted by tokenize()


@dataclass(frozen=True)
class Token:
    kind: TokenKind
    text: str

    @property
    def ring_label(self) -> int:
        if self.kind is not TokenKind.RING:
            raise ValueError(f"not a ring token: {self.text!r}")
        return int(self.text[1:]) if self.text.startswith("%") else int(self.text)


class TokenizeError(SmiganError):
    pass


class UnknownCharacter(TokenizeError):
    def __init__(self, text: str, position: int):
        super().__init__(f"unknown character {text[position]!r} at position {position}")
        self.position = position


class EmptyInput(TokenizeError):
    def __init__(self, message: str = "empty SMILES input"):
        super().__init__(message)


_TOKEN_RE = re.compile(
    r"""(?P<bracket>\[[^\[\]]*\])
      | (?P<atom>Cl|Br|[BCNOPSFI]|[bcnops])
      | (?P<bond>[-=\#:/\\])
      | (?P<ring>%[0-9]{2}|[0-9])
      | (?P<open>\()
      | (?P<close>\))
      | (?P<dot>\.)
    """,
    re.VERBOSE,
)

_GROUP_KIND = {
    "bracket": TokenKind.BRACKET,
    "atom": TokenKind.ATOM,
    "bond": TokenKind.BOND,
    "ring": TokenKind.RING,
    "open": TokenKind.BRANCH_OPEN,
    "close": TokenKind.BRANCH_CLOSE,
    "dot": TokenKind.DOT,
}


def tokenize(smiles: str) -> list[Token]:
    """Split a SMILES string into tokens, covering the input exactly.

    Raises UnknownCharacter at the first position outside the SMILES
    alphabet (including an unterminated bracket), EmptyInput on "".
    """
    if not smiles:
        raise EmptyInput()
    tokens: list[Token] = []
    pos = 0
    while pos < len(smiles):
        m = _TOKEN_RE.match(smiles, pos)
        if m is None:
            raise UnknownCharacter(smiles, pos)
        kind = _GROUP_KIND[m.lastgroup]
        tokens.append(Token(kind, m.group()))
        pos = m.end()
    return tokens


def detokenize(tokens: list[Token]) -> str:
    return "".join(t.text for t in tokens)
