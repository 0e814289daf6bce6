"""Concrete syntax: tokenizer, recursive-descent parser and pretty printer.

Statements::

    stmt  := unit [";" stmt]
    unit  := "skip" | ident ":=" expr
           | "if" expr "then" block ["else" block]
           | ["@i" nat] "while" expr "do" block
           | "_" ident "<" [sexpr ("," sexpr)*] ">" ":" stmt
           | block
    block := "{" stmt "}"

A label scopes over the whole statement that follows it, so grouping braces
are printed wherever a labelled statement (or a sequence) is the left operand
of ``;``.
"""
from __future__ import annotations

import re

from .errors import ArithmeticOverflow, ParseError
from .syntax import (
    Assign,
    BinOp,
    Cond,
    Expr,
    If,
    IndexedLabel,
    Indexing,
    Labelled,
    Num,
    SKIP,
    Seq,
    SimpleExpr,
    Skip,
    Stmt,
    Var,
    While,
    check_int64,
    is_reserved,
)

KEYWORDS = {"skip", "if", "then", "else", "while", "do"}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r]+|\#[^\n]*)
  | (?P<nl>\n)
  | (?P<int>[0-9]+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>:=|<=|>=|==|!=|&&|\|\||[;{}()<>+\-*%?:,@])
    """,
    re.VERBOSE,
)


class Token:
    __slots__ = ("kind", "text", "line", "col")

    def __init__(self, kind, text, line, col):
        self.kind = kind
        self.text = text
        self.line = line
        self.col = col

    def __repr__(self):
        return f"Token({self.kind}, {self.text!r}, {self.line}:{self.col})"


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind != "ws":
            tok_kind = kind
            if kind == "ident" and m.group() in KEYWORDS:
                tok_kind = "kw"
            tokens.append(Token(tok_kind, m.group(), line, pos - line_start + 1))
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


_CMP_OPS = ("==", "!=", "<", "<=", ">", ">=")


class Parser:
    def __init__(self, text: str, allow_reserved: bool = False):
        self.toks = tokenize(text)
        self.i = 0
        self.allow_reserved = allow_reserved

    # token helpers
    def peek(self, offset=0) -> Token:
        return self.toks[min(self.i + offset, len(self.toks) - 1)]

    def error(self, message, tok=None):
        tok = tok or self.peek()
        return ParseError(message, tok.line, tok.col)

    def at(self, text, offset=0) -> bool:
        t = self.peek(offset)
        return t.kind in ("op", "kw") and t.text == text

    def expect(self, text) -> Token:
        if not self.at(text):
            got = self.peek().text or "end of input"
            raise self.error(f"expected {text!r}, got {got!r}")
        return self.advance()

    def advance(self) -> Token:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def ident(self) -> str:
        tok = self.peek()
        if tok.kind != "ident":
            raise self.error(f"expected identifier, got {tok.text!r}")
        if not self.allow_reserved and is_reserved(tok.text):
            raise self.error(f"{tok.text!r} is reserved for instrumentation")
        self.advance()
        return tok.text

    def nat(self) -> int:
        tok = self.peek()
        if tok.kind != "int":
            raise self.error(f"expected natural number, got {tok.text!r}")
        self.advance()
        return int(tok.text)

    def done(self):
        if self.peek().kind != "eof":
            raise self.error(f"unexpected {self.peek().text!r}")

    # statements
    def stmt(self) -> Stmt:
        first = self.unit()
        if self.at(";"):
            self.advance()
            return Seq(first, self.stmt())
        return first

    def block(self) -> Stmt:
        self.expect("{")
        body = self.stmt()
        self.expect("}")
        return body

    def unit(self) -> Stmt:
        tok = self.peek()
        if self.at("skip"):
            self.advance()
            return SKIP
        if self.at("{"):
            return self.block()
        if self.at("if"):
            self.advance()
            cond = self.expr()
            self.expect("then")
            then = self.block()
            orelse = SKIP
            if self.at("else"):
                self.advance()
                orelse = self.block()
            return If(cond, then, orelse)
        if self.at("@") or self.at("while"):
            index = None
            if self.at("@"):
                self.advance()
                index = self.loop_index()
            self.expect("while")
            guard = self.expr()
            self.expect("do")
            return While(guard, self.block(), index)
        if tok.kind == "ident" and tok.text.startswith("_") and self.at("<", 1):
            label = self.label()
            self.expect(":")
            return Labelled(label, self.stmt())
        if tok.kind == "ident":
            var = self.ident()
            self.expect(":=")
            return Assign(var, self.expr())
        raise self.error(f"expected statement, got {tok.text or 'end of input'!r}")

    def loop_index(self) -> int:
        tok = self.peek()
        m = re.fullmatch(r"i([0-9]+)", tok.text) if tok.kind == "ident" else None
        if m is None:
            raise self.error(f"expected loop index like i0, got {tok.text!r}")
        self.advance()
        return int(m.group(1))

    def label(self) -> IndexedLabel:
        atom = self.advance().text
        self.expect("<")
        entries = []
        if not self.at(">"):
            entries.append(self.sexpr(0))
            while self.at(","):
                self.advance()
                entries.append(self.sexpr(len(entries)))
        self.expect(">")
        return IndexedLabel(atom, Indexing(tuple(entries)))

    def sexpr(self, k: int) -> SimpleExpr:
        tok = self.peek()
        if tok.kind == "int":
            n = self.nat()
            if not self.at("*"):
                return SimpleExpr(0, n, k)
            self.advance()
            a = n
        else:
            a = 1
        idx_tok = self.peek()
        if self.loop_index() != k:
            raise self.error(f"entry {k} of an indexing must be on i{k}", idx_tok)
        b = 0
        if self.at("+"):
            self.advance()
            b = self.nat()
        return SimpleExpr(a, b, k)

    # expressions
    def expr(self) -> Expr:
        test = self.binary(0)
        if self.at("?"):
            self.advance()
            then = self.expr()
            self.expect(":")
            return Cond(test, then, self.expr())
        return test

    _LEVELS = (("||",), ("&&",), _CMP_OPS, ("+", "-"), ("*", "%"))

    def binary(self, level: int) -> Expr:
        if level == len(self._LEVELS):
            return self.atom()
        ops = self._LEVELS[level]
        left = self.binary(level + 1)
        if ops is _CMP_OPS:
            if self.peek().kind == "op" and self.peek().text in ops:
                op = self.advance().text
                left = BinOp(op, left, self.binary(level + 1))
                if self.peek().kind == "op" and self.peek().text in ops:
                    raise self.error("comparisons do not chain; add parentheses")
            return left
        while self.peek().kind == "op" and self.peek().text in ops:
            op = self.advance().text
            left = BinOp(op, left, self.binary(level + 1))
        return left

    def atom(self) -> Expr:
        tok = self.peek()
        if tok.kind == "int":
            return Num(self._literal(int(self.advance().text), tok))
        if self.at("-") and self.peek(1).kind == "int":
            self.advance()
            return Num(self._literal(-int(self.advance().text), tok))
        if self.at("("):
            self.advance()
            e = self.expr()
            self.expect(")")
            return e
        if tok.kind == "ident":
            return Var(self.ident())
        raise self.error(f"expected expression, got {tok.text or 'end of input'!r}")

    def _literal(self, value, tok):
        try:
            return check_int64(value)
        except ArithmeticOverflow as exc:
            raise self.error(str(exc), tok) from None


def parse_stmt(text: str, allow_reserved: bool = False) -> Stmt:
    p = Parser(text, allow_reserved)
    s = p.stmt()
    p.done()
    return s


def parse_expr(text: str, allow_reserved: bool = False) -> Expr:
    p = Parser(text, allow_reserved)
    e = p.expr()
    p.done()
    return e


def parse_label(text: str) -> IndexedLabel:
    p = Parser(text)
    lab = p.label()
    p.done()
    return lab


# --- printing ----------------------------------------------------------------

_PREC = {"||": 1, "&&": 2, "+": 4, "-": 4, "*": 5, "%": 5}
_PREC.update({op: 3 for op in _CMP_OPS})


def format_expr(e: Expr, level: int = 0) -> str:
    """Render ``e``; parenthesize when its precedence is below ``level``."""
    if isinstance(e, Num):
        return str(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, BinOp):
        p = _PREC[e.op]
        # comparisons do not associate; the others associate left
        left = format_expr(e.left, p + 1 if p == 3 else p)
        right = format_expr(e.right, p + 1)
        out = f"{left}*{right}" if e.op == "*" else f"{left} {e.op} {right}"
        return f"({out})" if p < level else out
    if isinstance(e, Cond):
        out = f"({format_expr(e.test)}) ? {_arm(e.then)} : {_arm(e.orelse)}"
        return f"({out})" if level > 0 else out
    raise TypeError(f"not an expression: {e!r}")


def _arm(e: Expr) -> str:
    return f"({format_expr(e)})" if isinstance(e, Cond) else format_expr(e)


INDENT = "    "


def _lines(s: Stmt, depth: int) -> list[str]:
    pad = INDENT * depth
    if isinstance(s, Skip):
        return [pad + "skip"]
    if isinstance(s, Assign):
        return [f"{pad}{s.var} := {format_expr(s.expr)}"]
    if isinstance(s, Seq):
        if isinstance(s.first, (Seq, Labelled)):
            head = [pad + "{"] + _lines(s.first, depth + 1) + [pad + "}"]
        else:
            head = _lines(s.first, depth)
        head[-1] += ";"
        return head + _lines(s.second, depth)
    if isinstance(s, Labelled):
        body = _lines(s.body, depth)
        body[0] = f"{pad}{s.label}: {body[0][len(pad):]}"
        return body
    if isinstance(s, If):
        out = [f"{pad}if {format_expr(s.cond)} then {{"] + _lines(s.then, depth + 1)
        if isinstance(s.orelse, Skip):
            return out + [pad + "}"]
        return out + [pad + "} else {"] + _lines(s.orelse, depth + 1) + [pad + "}"]
    if isinstance(s, While):
        idx = "" if s.index is None else f"@i{s.index} "
        return [f"{pad}{idx}while {format_expr(s.guard)} do {{"] + _lines(s.body, depth + 1) + [pad + "}"]
    raise TypeError(f"not a statement: {s!r}")


def pretty_print(s: Stmt) -> str:
    return "\n".join(_lines(s, 0))


def format_trace(trace) -> str:
    return "".join(lab.trace_str() + "\n" for lab in trace)


def parse_trace(text: str) -> list[IndexedLabel]:
    out = []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        m = re.fullmatch(r"(_[A-Za-z0-9_]*)<([0-9,\s]*)>", line)
        if m is None:
            raise ParseError(f"bad trace line {line!r}")
        vals = [int(v) for v in m.group(2).split(",") if v.strip()]
        out.append(IndexedLabel(m.group(1), Indexing.constant(vals)))
    return out

