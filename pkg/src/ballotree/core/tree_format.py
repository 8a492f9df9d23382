"""
Text format for voting trees.

    leaf      := decimal candidate | identifier (variable)
    internal  := "(" left right ")"
    file      := ("(def" @name tree ")")* tree

Large trees are written with "def" bindings for every node that has more than
one parent, and referenced afterwards as @name; small trees are written fully
expanded so golden files stay readable.
"""
from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from typing import Iterator, Optional

from .errors import ParseError
from .voting_tree import VotingTree, as_label, iter_nodes, leaf, node
from ..utils.config import get_config

logger = logging.getLogger(__name__)

_TOKEN = re.compile(r"\s+|;[^\n]*|\(|\)|[^\s();]+")
_REF = re.compile(r"@[A-Za-z0-9_]+\Z")


@dataclass(frozen=True)
class Token:
    text: str
    start: int


def _tokenize(text: str) -> Iterator[Token]:
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos, text)
        if not (m.group().isspace() or m.group().startswith(";")):
            yield Token(m.group(), pos)
        pos = m.end()


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = list(_tokenize(text))
        self.pos = 0
        self.defs: dict[str, VotingTree] = {}

    def _peek(self, offset: int = 0) -> Optional[Token]:
        index = self.pos + offset
        return self.tokens[index] if index < len(self.tokens) else None

    def _next(self, what: str) -> Token:
        tok = self._peek()
        if tok is None:
            raise ParseError(f"expected {what}, reached end of input", len(self.text), self.text)
        self.pos += 1
        return tok

    def _expect(self, literal: str) -> None:
        tok = self._next(f"'{literal}'")
        if tok.text != literal:
            raise ParseError(f"expected '{literal}', got {tok.text!r}", tok.start, self.text)

    def parse(self) -> VotingTree:
        while self._peek() is not None and self._peek().text == "(" and \
                self._peek(1) is not None and self._peek(1).text == "def":
            self._definition()
        tree = self._expr()
        extra = self._peek()
        if extra is not None:
            raise ParseError(f"unexpected trailing input {extra.text!r}", extra.start, self.text)
        return tree

    def _definition(self) -> None:
        self._expect("(")
        self._expect("def")
        name = self._next("a @name")
        if not _REF.match(name.text):
            raise ParseError(f"definition names look like @name, got {name.text!r}", name.start, self.text)
        if name.text in self.defs:
            raise ParseError(f"duplicate definition {name.text}", name.start, self.text)
        tree = self._expr()
        self._expect(")")
        self.defs[name.text] = tree

    def _expr(self) -> VotingTree:
        """One subtree, with an explicit stack of open parentheses so depth is unbounded."""
        open_nodes: list[list[VotingTree]] = []
        while True:
            tok = self._next("a subtree")
            if tok.text == "(":
                open_nodes.append([])
                continue
            value = self._atom(tok)
            while open_nodes:
                children = open_nodes[-1]
                children.append(value)
                if len(children) < 2:
                    break
                self._expect(")")
                open_nodes.pop()
                value = node(children[0], children[1])
            else:
                return value

    def _atom(self, tok: Token) -> VotingTree:
        if tok.text == ")":
            raise ParseError("expected a subtree, got ')'", tok.start, self.text)
        if tok.text.startswith("@"):
            if tok.text not in self.defs:
                raise ParseError(f"reference to undefined {tok.text}", tok.start, self.text)
            return self.defs[tok.text]
        if tok.text == "def":
            raise ParseError("'def' is only allowed at the top level", tok.start, self.text)
        try:
            return leaf(as_label(tok.text))
        except ValueError:
            raise ParseError(f"bad leaf label {tok.text!r}", tok.start, self.text) from None


def parse(text: str) -> VotingTree:
    """Parse tree text; malformed input raises ParseError carrying the position."""
    return _Parser(text).parse()


def _parent_counts(tree: VotingTree) -> dict[int, int]:
    counts: dict[int, int] = {}
    for current in iter_nodes(tree):
        if not current.is_leaf:
            counts[current.left.uid] = counts.get(current.left.uid, 0) + 1
            counts[current.right.uid] = counts.get(current.right.uid, 0) + 1
    return counts


def serialize(tree: VotingTree, share: Optional[bool] = None, threshold: Optional[int] = None) -> str:
    """
    Render a tree as text. With share=None the def form is used once the
    expanded leaf count exceeds the configured threshold.
    """
    if share is None:
        threshold = get_config().get('share_threshold') if threshold is None else threshold
        share = tree.leaf_count > threshold

    parents = _parent_counts(tree) if share else {}
    rendered: dict[int, str] = {}
    definitions: list[str] = []
    for current in iter_nodes(tree):
        if current.is_leaf:
            text = str(current.label)
        else:
            text = f"({rendered[current.left.uid]} {rendered[current.right.uid]})"
            if parents.get(current.uid, 0) > 1:
                name = f"@{len(definitions)}"
                definitions.append(f"(def {name} {text})")
                text = name
        rendered[current.uid] = text

    if definitions:
        logger.debug(f"Serialized with {len(definitions)} shared definitions")
    return "\n".join([*definitions, rendered[tree.uid]]) + "\n"
