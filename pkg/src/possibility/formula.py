"""Modal formulas: syntax trees, a text parser and printer, substitution,
and the modal negative translation.

Primitive connectives are negation, conjunction, implication and indexed
boxes.  Disjunction, diamonds, the biconditional and the constants are
abbreviations that expand into primitive trees when constructed.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Union

RESERVED_VAR = "#v"


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    child: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Imp:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Box:
    index: str
    child: "Formula"


Formula = Union[Var, Neg, And, Imp, Box]


def Or(a: Formula, b: Formula) -> Formula:
    return Neg(And(Neg(a), Neg(b)))


def Dia(index: str, a: Formula) -> Formula:
    return Neg(Box(index, Neg(a)))


def Iff(a: Formula, b: Formula) -> Formula:
    return And(Imp(a, b), Imp(b, a))


Bot: Formula = And(Var(RESERVED_VAR), Neg(Var(RESERVED_VAR)))
Top: Formula = Neg(Bot)


def boxes(indices, f: Formula) -> Formula:
    """Prefix f with one box per index, outermost first."""
    for i in reversed(tuple(indices)):
        f = Box(i, f)
    return f


def diamonds(indices, f: Formula) -> Formula:
    for i in reversed(tuple(indices)):
        f = Dia(i, f)
    return f


def variables(f: Formula) -> list[str]:
    out: set[str] = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, Var):
            out.add(g.name)
        elif isinstance(g, (Neg, Box)):
            stack.append(g.child)
        else:
            stack.append(g.left)
            stack.append(g.right)
    return sorted(out)


def indices(f: Formula) -> list[str]:
    out: set[str] = set()
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, Box):
            out.add(g.index)
            stack.append(g.child)
        elif isinstance(g, Neg):
            stack.append(g.child)
        elif isinstance(g, (And, Imp)):
            stack.append(g.left)
            stack.append(g.right)
    return sorted(out)


def modal_depth(f: Formula) -> int:
    if isinstance(f, Var):
        return 0
    if isinstance(f, Neg):
        return modal_depth(f.child)
    if isinstance(f, Box):
        return 1 + modal_depth(f.child)
    return max(modal_depth(f.left), modal_depth(f.right))


def substitute(f: Formula, s: Mapping[str, Formula]) -> Formula:
    """Simultaneous uniform substitution."""
    if isinstance(f, Var):
        return s.get(f.name, f)
    if isinstance(f, Neg):
        return Neg(substitute(f.child, s))
    if isinstance(f, And):
        return And(substitute(f.left, s), substitute(f.right, s))
    if isinstance(f, Imp):
        return Imp(substitute(f.left, s), substitute(f.right, s))
    return Box(f.index, substitute(f.child, s))


def negative_translation(f: Formula) -> Formula:
    if isinstance(f, Var):
        return Neg(Neg(f))
    if isinstance(f, Neg):
        return Neg(negative_translation(f.child))
    if isinstance(f, And):
        return And(negative_translation(f.left), negative_translation(f.right))
    if isinstance(f, Imp):
        return Imp(negative_translation(f.left), negative_translation(f.right))
    return Neg(Neg(Box(f.index, negative_translation(f.child))))


# ---------------------------------------------------------------- parsing

class ParseError(ValueError):
    def __init__(self, offset: int, expected, found: str):
        self.offset = offset
        self.expected = tuple(sorted(expected))
        self.found = found
        super().__init__(
            f"syntax error at offset {offset}: found {found!r}, "
            f"expected one of {', '.join(self.expected)}")


_SYMBOLS = ("<->", "->", "~", "&", "|", "(", ")", "#t", "#f", "#v")
_ATOM_START = ("variable", "~", "(", "[", "<", "#t", "#f")


def _is_ident_start(c: str) -> bool:
    return c.isalpha() or c == "_"


def _is_ident_char(c: str) -> bool:
    return c.isalnum() or c == "_"


def _tokenize(text: str):
    """Yield (kind, value, byte offset) triples."""
    toks = []
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        off = len(text[:i].encode("utf-8"))
        if c in "[<" and not text.startswith("<->", i):
            close = "]" if c == "[" else ">"
            j = i + 1
            while j < n and text[j].isspace():
                j += 1
            k = j
            while k < n and _is_ident_char(text[k]):
                k += 1
            m = k
            while m < n and text[m].isspace():
                m += 1
            if k == j or m >= n or text[m] != close:
                raise ParseError(off, ["modal index in " + c + close], text[i:i + 1])
            toks.append(("box" if c == "[" else "dia", text[j:k], off))
            i = m + 1
            continue
        for sym in _SYMBOLS:
            if text.startswith(sym, i):
                if sym == "#v":
                    toks.append(("variable", RESERVED_VAR, off))
                else:
                    toks.append((sym, sym, off))
                i += len(sym)
                break
        else:
            if _is_ident_start(c):
                j = i
                while j < n and _is_ident_char(text[j]):
                    j += 1
                toks.append(("variable", text[i:j], off))
                i = j
            else:
                raise ParseError(off, _ATOM_START, c)
    toks.append(("end", "", len(text.encode("utf-8"))))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.toks[self.pos]

    def take(self, kind):
        tok = self.peek()
        if tok[0] != kind:
            raise ParseError(tok[2], [kind], tok[1] or "end of input")
        self.pos += 1
        return tok

    def parse(self) -> Formula:
        f = self.iff()
        tok = self.peek()
        if tok[0] != "end":
            raise ParseError(tok[2], ["<->", "->", "|", "&", "end of input"], tok[1])
        return f

    def iff(self):
        f = self.imp()
        while self.peek()[0] == "<->":
            self.pos += 1
            f = Iff(f, self.imp())
        return f

    def imp(self):
        f = self.disj()
        if self.peek()[0] == "->":
            self.pos += 1
            return Imp(f, self.imp())
        return f

    def disj(self):
        f = self.conj()
        while self.peek()[0] == "|":
            self.pos += 1
            f = Or(f, self.conj())
        return f

    def conj(self):
        f = self.unary()
        while self.peek()[0] == "&":
            self.pos += 1
            f = And(f, self.unary())
        return f

    def unary(self):
        kind, value, off = self.peek()
        if kind == "~":
            self.pos += 1
            return Neg(self.unary())
        if kind == "box":
            self.pos += 1
            return Box(value, self.unary())
        if kind == "dia":
            self.pos += 1
            return Dia(value, self.unary())
        if kind == "variable":
            self.pos += 1
            return Var(value)
        if kind == "#t":
            self.pos += 1
            return Top
        if kind == "#f":
            self.pos += 1
            return Bot
        if kind == "(":
            self.pos += 1
            f = self.iff()
            self.take(")")
            return f
        raise ParseError(off, _ATOM_START, value or "end of input")


def parse(text: str) -> Formula:
    return _Parser(text).parse()


# --------------------------------------------------------------- printing

# binding strength; prefix operators bind tightest
_PREC = {"iff": 1, "imp": 2, "or": 3, "and": 4, "prefix": 5, "atom": 6}


def _view(f: Formula):
    """Recognize abbreviations so printing stays readable."""
    if f == Bot:
        return ("atom", "#f")
    if f == Top:
        return ("atom", "#t")
    if isinstance(f, Var):
        return ("atom", f.name)
    if isinstance(f, Neg):
        c = f.child
        if isinstance(c, And) and isinstance(c.left, Neg) and isinstance(c.right, Neg):
            return ("or", c.left.child, c.right.child)
        if isinstance(c, Box) and isinstance(c.child, Neg):
            return ("prefix", f"<{c.index}>", c.child.child)
        return ("prefix", "~", c)
    if isinstance(f, Box):
        return ("prefix", f"[{f.index}]", f.child)
    if isinstance(f, And):
        l, r = f.left, f.right
        if (isinstance(l, Imp) and isinstance(r, Imp)
                and l.left == r.right and l.right == r.left):
            return ("iff", l.left, l.right)
        return ("and", l, r)
    return ("imp", f.left, f.right)


_OP_TEXT = {"iff": " <-> ", "imp": " -> ", "or": " | ", "and": " & "}


def to_text(f: Formula) -> str:
    v = _view(f)
    kind = v[0]
    if kind == "atom":
        return v[1]
    if kind == "prefix":
        child = v[2]
        inner = to_text(child)
        if _PREC[_view(child)[0]] < _PREC["prefix"]:
            inner = f"({inner})"
        return v[1] + inner
    left, right = v[1], v[2]
    p = _PREC[kind]
    lt, rt = to_text(left), to_text(right)
    lp, rp = _PREC[_view(left)[0]], _PREC[_view(right)[0]]
    # implication groups to the right, the others to the left
    if lp < p or (lp == p and kind == "imp"):
        lt = f"({lt})"
    if rp < p or (rp == p and kind != "imp"):
        rt = f"({rt})"
    return lt + _OP_TEXT[kind] + rt
