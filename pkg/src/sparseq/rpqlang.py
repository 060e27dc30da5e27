"""Surface syntax for two-way regular path queries.

A query is three whitespace-separated parts: a subject term, a path
expression and an object term.  Terms are ``?var`` variables, bare
identifiers, or ``<angle-quoted>`` strings.  Expressions use ``/`` for
concatenation, ``|`` for alternation, postfix ``* + ?``, prefix ``^``
for label inversion, ``eps`` for the empty word, and parentheses::

    CentralPark  walk/(N|Q|R)+/walk  ?y

Postfix binds tighter than ``/``, which binds tighter than ``|``.
"""

from __future__ import annotations

from dataclasses import dataclass


class RpqSyntaxError(ValueError):
    """Parse failure; carries the character offset of the problem."""

    def __init__(self, message: str, pos: int):
        super().__init__("%s (at offset %d)" % (message, pos))
        self.pos = pos


# --- AST ---------------------------------------------------------------


@dataclass(frozen=True)
class Epsilon:
    pass


@dataclass(frozen=True)
class Label:
    name: str


@dataclass(frozen=True)
class InverseLabel:
    name: str


@dataclass(frozen=True)
class Concat:
    children: tuple

    def __post_init__(self):
        if len(self.children) < 2:
            raise ValueError("Concat needs >= 2 children")


@dataclass(frozen=True)
class Alt:
    children: tuple

    def __post_init__(self):
        if len(self.children) < 2:
            raise ValueError("Alt needs >= 2 children")


@dataclass(frozen=True)
class Star:
    child: object


@dataclass(frozen=True)
class Plus:
    child: object


@dataclass(frozen=True)
class Optional:
    child: object


@dataclass(frozen=True)
class Variable:
    name: str


@dataclass(frozen=True)
class Constant:
    value: str


@dataclass(frozen=True)
class RpqQuery:
    subject: object
    expr: object
    object: object


# --- tokenizer ---------------------------------------------------------

_IDENT_CHARS = frozenset(
    "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_-."
)
_PUNCT = frozenset("/|*+?^()")


def _tokenize(text: str):
    """Yield (kind, value, pos) tuples; kind is one of 'ident',
    'quoted', 'var', or the punctuation character itself."""
    tokens = []
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if ch == "?" and i + 1 < n and text[i + 1] in _IDENT_CHARS:
            j = i + 1
            while j < n and text[j] in _IDENT_CHARS:
                j += 1
            tokens.append(("var", text[i + 1 : j], i))
            i = j
        elif ch in _PUNCT:
            tokens.append((ch, ch, i))
            i += 1
        elif ch == "<":
            j = i + 1
            out = []
            while True:
                if j >= n:
                    raise RpqSyntaxError("unterminated '<' string", i)
                c = text[j]
                if c == ">":
                    break
                if c == "\\":
                    if j + 1 >= n or text[j + 1] not in ("\\", ">", "<"):
                        raise RpqSyntaxError("unknown escape", j)
                    out.append(text[j + 1])
                    j += 2
                else:
                    out.append(c)
                    j += 1
            tokens.append(("quoted", "".join(out), i))
            i = j + 1
        elif ch in _IDENT_CHARS:
            j = i
            while j < n and text[j] in _IDENT_CHARS:
                j += 1
            tokens.append(("ident", text[i:j], i))
            i = j
        else:
            raise RpqSyntaxError("unexpected character %r" % ch, i)
    tokens.append(("eof", "", n))
    return tokens


# --- parser ------------------------------------------------------------


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, kind):
        tok = self.take()
        if tok[0] != kind:
            raise RpqSyntaxError("expected %r, found %r" % (kind, tok[1] or "end"), tok[2])
        return tok

    def query(self) -> RpqQuery:
        subject = self.term()
        expr = self.alt()
        obj = self.term()
        tok = self.peek()
        if tok[0] != "eof":
            raise RpqSyntaxError("trailing input %r" % tok[1], tok[2])
        return RpqQuery(subject, expr, obj)

    def term(self):
        kind, value, pos = self.take()
        if kind == "var":
            return Variable(value)
        if kind in ("ident", "quoted"):
            return Constant(value)
        raise RpqSyntaxError("expected a ?variable or node, found %r" % (value or "end"), pos)

    def alt(self):
        branches = [self.seq()]
        while self.peek()[0] == "|":
            self.take()
            branches.append(self.seq())
        return branches[0] if len(branches) == 1 else Alt(tuple(branches))

    def seq(self):
        parts = [self.post()]
        while self.peek()[0] == "/":
            self.take()
            parts.append(self.post())
        return parts[0] if len(parts) == 1 else Concat(tuple(parts))

    def post(self):
        node = self.atom()
        while True:
            kind = self.peek()[0]
            if kind == "*":
                node = Star(node)
            elif kind == "+":
                node = Plus(node)
            elif kind == "?":
                node = Optional(node)
            else:
                return node
            self.take()

    def atom(self):
        kind, value, pos = self.peek()
        if kind == "(":
            self.take()
            node = self.alt()
            self.expect(")")
            return node
        if kind == "^":
            self.take()
            return InverseLabel(self._label_name())
        if kind == "ident":
            self.take()
            return Epsilon() if value == "eps" else Label(value)
        if kind == "quoted":
            self.take()
            return Label(value)
        raise RpqSyntaxError("expected a label, found %r" % (value or "end"), pos)

    def _label_name(self) -> str:
        kind, value, pos = self.take()
        if kind not in ("ident", "quoted") or (kind == "ident" and value == "eps"):
            raise RpqSyntaxError("'^' must be followed by a label", pos)
        return value


def parse(text: str) -> RpqQuery:
    """Parse a full 2RPQ ``subject expr object``."""
    return _Parser(text).query()


def parse_expr(text: str):
    """Parse a bare path expression (no subject/object terms)."""
    p = _Parser(text)
    node = p.alt()
    tok = p.peek()
    if tok[0] != "eof":
        raise RpqSyntaxError("trailing input %r" % tok[1], tok[2])
    return node


# --- printer -----------------------------------------------------------

_BARE_OK = _IDENT_CHARS


def _print_name(name: str) -> str:
    if name and all(c in _BARE_OK for c in name) and name != "eps":
        return name
    escaped = name.replace("\\", "\\\\").replace(">", "\\>").replace("<", "\\<")
    return "<%s>" % escaped


def _print_level(node) -> tuple[str, int]:
    """Render a node and its precedence level (0=alt, 1=seq, 2=postfix)."""
    if isinstance(node, Epsilon):
        return "eps", 2
    if isinstance(node, Label):
        return _print_name(node.name), 2
    if isinstance(node, InverseLabel):
        return "^" + _print_name(node.name), 2
    if isinstance(node, Alt):
        return "|".join(_wrap(c, 1) for c in node.children), 0
    if isinstance(node, Concat):
        return "/".join(_wrap(c, 2) for c in node.children), 1
    if isinstance(node, (Star, Plus, Optional)):
        mark = {Star: "*", Plus: "+", Optional: "?"}[type(node)]
        return _wrap(node.child, 2) + mark, 2
    raise TypeError("unknown AST node %r" % (node,))


def _wrap(node, need: int) -> str:
    text, level = _print_level(node)
    return "(%s)" % text if level < need else text


def print_expr(node) -> str:
    """Inverse of parse_expr: parse_expr(print_expr(n)) == n."""
    return _print_level(node)[0]


def _print_term(term) -> str:
    if isinstance(term, Variable):
        return "?" + term.name
    if isinstance(term, Constant):
        return _print_name(term.value)
    raise TypeError("unknown term %r" % (term,))


def print_query(q: RpqQuery) -> str:
    return "%s  %s  %s" % (_print_term(q.subject), print_expr(q.expr), _print_term(q.object))
