"""Reader for the rule language and canonical printing of answer sets.

Accepted statements::

    p(t1,...,tn).                 fact (``disc(1..4).`` expands intervals)
    h :- l1, ..., ln.             rule; li is ``a``, ``not a`` or ``t1 OP t2``
    :- l1, ..., ln.               constraint
    #show p/n.   #hide.           output filtering
    % comment

``-p(...)`` is classical negation, OP is one of ``< <= > >= = != <>``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import count, product
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Tuple

from .core import (
    BOTTOM_ATOM,
    ArityConflict,
    Atom,
    BinOp,
    Builtin,
    Func,
    ModelError,
    Program,
    Rule,
    ShowFilter,
    Var,
    atom_sort_key,
    atom_str,
    check_safety,
    is_ground,
    make_func,
    make_program,
    rewrite_strong_negation,
)


class ParseError(ModelError):
    def __init__(self, message: str, line: int, col: int, source: str = "<string>", kind: str = "syntax"):
        super().__init__(f"{source}:{line}:{col}: {kind} error: {message}")
        self.line = line
        self.col = col
        self.source = source
        self.kind = kind


_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<comment>%[^\n]*)
  | (?P<directive>\#[a-z]+)
  | (?P<op>:-|\.\.|<=|>=|!=|<>|[<>=().,+\-*/])
  | (?P<int>[0-9]+)
  | (?P<var>[A-Z_][A-Za-z0-9_]*)
  | (?P<ident>[a-z][A-Za-z0-9_]*)
    """,
    re.VERBOSE,
)

_RELOPS = {"<", "<=", ">", ">=", "=", "!=", "<>"}


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


@dataclass(frozen=True)
class _Neg:
    """Unary minus on a non-integer; becomes classical negation or ``0 - t``."""

    inner: object


@dataclass(frozen=True)
class _Interval:
    lo: object
    hi: object


def _tokenize(text: str, source: str) -> List[_Tok]:
    toks: List[_Tok] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1, source)
        kind = m.lastgroup
        chunk = m.group()
        if kind not in ("ws", "comment"):
            toks.append(_Tok(kind, chunk, line, pos - line_start + 1))
        nl = chunk.count("\n")
        if nl:
            line += nl
            line_start = pos + chunk.rindex("\n") + 1
        pos = m.end()
    toks.append(_Tok("eof", "", line, pos - line_start + 1))
    return toks


class _Parser:
    def __init__(self, text: str, source: str):
        self.toks = _tokenize(text, source)
        self.i = 0
        self.source = source
        self.anon = count(1)
        self.rules: List[Tuple[Rule, int, int]] = []
        self.show = ShowFilter()

    # -- token helpers
    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def error(self, message: str, tok: Optional[_Tok] = None, kind: str = "syntax") -> ParseError:
        tok = tok or self.tok
        return ParseError(message, tok.line, tok.col, self.source, kind)

    def accept(self, text: str) -> bool:
        if self.tok.kind in ("op", "directive", "ident") and self.tok.text == text:
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> _Tok:
        if not self.accept(text):
            shown = self.tok.text or "end of input"
            raise self.error(f"expected {text!r}, found {shown!r}")
        return self.toks[self.i - 1]

    # -- statements
    def parse(self) -> None:
        while self.tok.kind != "eof":
            self.statement()

    def statement(self) -> None:
        start = self.tok
        if self.tok.kind == "directive":
            self.directive()
            return
        if self.accept(":-"):
            pos, neg, builtins = self.body()
            self.expect(".")
            self.rules.append((Rule(BOTTOM_ATOM, pos, neg, builtins), start.line, start.col))
            return
        head_term = self.expr()
        heads = self.head_atoms(head_term, start)
        if self.accept(":-"):
            if len(heads) != 1:
                raise self.error("intervals are only allowed in facts", start)
            pos, neg, builtins = self.body()
            self.expect(".")
            self.rules.append((Rule(heads[0], pos, neg, builtins), start.line, start.col))
            return
        self.expect(".")
        for h in heads:
            self.rules.append((Rule(h), start.line, start.col))

    def directive(self) -> None:
        tok = self.tok
        self.i += 1
        if tok.text == "#hide":
            self.show.active = True
            self.expect(".")
        elif tok.text == "#show":
            self.show.active = True
            if self.tok.kind == "ident":
                name = self.tok.text
                self.i += 1
                self.expect("/")
                if self.tok.kind != "int":
                    raise self.error("expected arity after '/'")
                arity = int(self.tok.text)
                self.i += 1
                self.show.shown.add((name, arity))
            self.expect(".")
        else:
            raise self.error(f"unknown directive {tok.text}", tok)

    def head_atoms(self, t, tok: _Tok) -> List[Atom]:
        atom = self.to_atom(t, tok, allow_interval=True)
        ranges = []
        for a in atom.args:
            if isinstance(a, _Interval):
                lo, hi = a.lo, a.hi
                if type(lo) is not int or type(hi) is not int:
                    raise self.error("interval bounds must be integers", tok)
                ranges.append(range(lo, hi + 1))
            else:
                ranges.append((a,))
        return [Atom(atom.pred, tuple(args)) for args in product(*ranges)]

    def body(self):
        pos, neg, builtins = [], [], []
        while True:
            tok = self.tok
            if self.accept("not"):
                neg.append(self.to_atom(self.expr(), tok))
            else:
                left = self.expr()
                if self.tok.kind == "op" and self.tok.text in _RELOPS:
                    op = self.tok.text
                    self.i += 1
                    right = self.expr()
                    op = "!=" if op == "<>" else op
                    builtins.append(Builtin(op, self.arith(left, tok), self.arith(right, tok)))
                else:
                    pos.append(self.to_atom(left, tok))
            if not self.accept(","):
                break
        return tuple(pos), tuple(neg), tuple(builtins)

    # -- terms
    def expr(self):
        left = self.mult()
        while self.tok.kind == "op" and self.tok.text in ("+", "-"):
            op = self.tok.text
            tok = self.tok
            self.i += 1
            right = self.mult()
            left = BinOp(op, self.arith(left, tok), self.arith(right, tok))
        if self.tok.kind == "op" and self.tok.text == "..":
            self.i += 1
            return _Interval(left, self.expr())
        return left

    def mult(self):
        left = self.unary()
        while self.accept("*"):
            tok = self.toks[self.i - 1]
            right = self.unary()
            left = BinOp("*", self.arith(left, tok), self.arith(right, tok))
        return left

    def unary(self):
        if self.accept("-"):
            inner = self.unary()
            if type(inner) is int:
                return -inner
            return _Neg(inner)
        return self.primary()

    def primary(self):
        tok = self.tok
        if tok.kind == "int":
            self.i += 1
            return int(tok.text)
        if tok.kind == "var":
            self.i += 1
            if tok.text == "_":
                return Var(f"_{next(self.anon)}")
            return Var(tok.text)
        if tok.kind == "ident":
            self.i += 1
            if self.accept("("):
                args = [self.expr()]
                while self.accept(","):
                    args.append(self.expr())
                self.expect(")")
                return _Call(tok.text, tuple(args))
            return tok.text
        if self.accept("("):
            inner = self.expr()
            self.expect(")")
            return inner
        raise self.error(f"unexpected {tok.text or 'end of input'!r}")

    def arith(self, t, tok: _Tok):
        """Convert a parsed expression into a core term."""
        if isinstance(t, _Interval):
            raise self.error("interval outside a fact argument", tok)
        if isinstance(t, _Neg):
            inner = self.arith(t.inner, tok)
            if isinstance(inner, (Var, BinOp)):
                return BinOp("-", 0, inner)
            raise self.error("unary minus applied to a non-numeric term", tok)
        if isinstance(t, _Call):
            return make_func(t.name, (self.arith(a, tok) for a in t.args))
        return t

    def to_atom(self, t, tok: _Tok, allow_interval: bool = False) -> Atom:
        classical = False
        if isinstance(t, _Neg):
            classical = True
            t = t.inner
        if isinstance(t, str):
            name, args = t, ()
        elif isinstance(t, _Call):
            name = t.name
            args = tuple(
                _Interval(self.arith(a.lo, tok), self.arith(a.hi, tok))
                if allow_interval and isinstance(a, _Interval)
                else self.arith(a, tok)
                for a in t.args
            )
        else:
            raise self.error("expected an atom", tok)
        return Atom(("-" + name) if classical else name, args)


@dataclass(frozen=True)
class _Call:
    name: str
    args: tuple


def _parse_rules(text: str, source: str):
    p = _Parser(text, source)
    p.parse()
    return p.rules, p.show


def _finish(chunks, source_for_errors: str = "<string>") -> Program:
    located: List[Tuple[Rule, int, int, str]] = []
    show = ShowFilter()
    for rules, sh, source in chunks:
        located.extend((r, line, col, source) for r, line, col in rules)
        show.active = show.active or sh.active
        show.shown |= sh.shown
    arities: dict = {}
    for r, line, col, source in located:
        violation = check_safety(r)
        if violation is not None:
            raise ParseError(f"{violation}", line, col, source, "safety")
        atoms = list(r.pos) + list(r.neg) + ([] if r.is_constraint else [r.head])
        for a in atoms:
            known = arities.setdefault(a.pred, a.arity)
            if known != a.arity:
                raise ParseError(f"predicate {a.pred} used with arities {known} and {a.arity}", line, col, source, "arity")
    rules = rewrite_strong_negation([r for r, *_ in located])
    try:
        return make_program(_dedupe_constraints(rules), show)
    except ArityConflict as exc:
        raise ParseError(str(exc), 1, 1, source_for_errors, "arity") from None


def _dedupe_constraints(rules: List[Rule]) -> List[Rule]:
    # keeps rewrite_strong_negation idempotent under print/parse round trips
    seen = set()
    out = []
    for r in rules:
        if r.is_constraint:
            key = str(r)
            if key in seen:
                continue
            seen.add(key)
        out.append(r)
    return out


def parse_program(text: str, source: str = "<string>") -> Program:
    """Parse program text; raises :class:`ParseError` with a source position."""
    rules, show = _parse_rules(text, source)
    return _finish([(rules, show, source)], source)


def parse_files(paths: Sequence) -> Program:
    chunks = []
    for path in paths:
        path = Path(path)
        rules, show = _parse_rules(path.read_text(encoding="utf-8"), str(path))
        chunks.append((rules, show, str(path)))
    return _finish(chunks)


def parse_atoms(text: str) -> frozenset:
    """Parse a whitespace separated list of ground atoms, e.g. ``"a(1) b"``."""
    if not text.strip():
        return frozenset()
    program = parse_program(" ".join(f"{chunk}." for chunk in _split_atoms(text)))
    out = set()
    for r in program.rules:
        out.add(r.head.ground({}))
    return frozenset(out)


def _split_atoms(text: str) -> Iterable[str]:
    depth, cur = 0, []
    for ch in text.strip():
        if ch.isspace() and depth == 0:
            if cur:
                yield "".join(cur)
                cur = []
            continue
        depth += ch == "("
        depth -= ch == ")"
        cur.append(ch)
    if cur:
        yield "".join(cur)


def format_answer_set(atoms: Iterable, show: Optional[ShowFilter] = None) -> str:
    """One deterministic line: atoms sorted by predicate, arity, then arguments."""
    kept = [a for a in atoms if show is None or show.keep(a)]
    return " ".join(atom_str(a) for a in sorted(kept, key=atom_sort_key))


def format_program(program: Program) -> str:
    lines = [str(r) for r in program.all_rules()]
    if program.show.active:
        lines.append("#hide.")
        lines.extend(f"#show {name}/{arity}." for name, arity in sorted(program.show.shown))
    return "\n".join(lines) + ("\n" if lines else "")


__all__ = [
    "ParseError",
    "parse_program",
    "parse_files",
    "parse_atoms",
    "format_answer_set",
    "format_program",
    "is_ground",
    "Func",
]
