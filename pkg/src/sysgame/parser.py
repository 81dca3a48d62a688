"""Concrete syntax for `.slc` module files.

    export f; import g;
    decl x = 3;
    decl f(y) { local z; z = new(); *z + y }

A body is zero or more `local` lines, then statements; the final item (a bare
expression or `return e`) supplies the function's value, unit if absent.
`//` comments run to end of line.  The parser also performs the structural
desugaring: statement lists become right-nested sequencing, `local x, y`
becomes nested single binders, multi-argument calls become one tuple
argument.  Identifiers stay symbolic (Var leaves) until resolution.
"""

from __future__ import annotations

from dataclasses import dataclass

from .lang import BinExp, Call, Deref, If, Local, New, TupleExp, Var, seq

KEYWORDS = {"export", "import", "decl", "local", "if", "then", "else", "return", "new"}

SYMBOLS = ("==", "(", ")", "{", "}", ";", ",", "=", "<", "+", "-", "*")


class ParseError(ValueError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col


@dataclass(frozen=True)
class Token:
    kind: str  # "ident" | "int" | "sym" | "eof"
    text: str
    line: int
    col: int


def tokenize(src: str) -> list:
    toks = []
    i, line, col = 0, 1, 1
    n = len(src)
    while i < n:
        ch = src[i]
        if ch == "\n":
            i, line, col = i + 1, line + 1, 1
            continue
        if ch in " \t\r":
            i, col = i + 1, col + 1
            continue
        if src.startswith("//", i):
            while i < n and src[i] != "\n":
                i += 1
            continue
        if ch.isdigit():
            j = i
            while j < n and src[j].isdigit():
                j += 1
            toks.append(Token("int", src[i:j], line, col))
            col += j - i
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (src[j].isalnum() or src[j] == "_"):
                j += 1
            toks.append(Token("ident", src[i:j], line, col))
            col += j - i
            i = j
            continue
        for sym in SYMBOLS:
            if src.startswith(sym, i):
                toks.append(Token("sym", sym, line, col))
                i += len(sym)
                col += len(sym)
                break
        else:
            raise ParseError(f"unexpected character {ch!r}", line, col)
    toks.append(Token("eof", "", line, col))
    return toks


@dataclass(frozen=True)
class SourceModule:
    exports: tuple  # tuple[str, ...]
    imports: tuple
    var_decls: tuple  # tuple[(ident, initial int), ...]
    fun_decls: tuple  # tuple[(ident, params, body Exp), ...]

    def declared(self) -> tuple:
        return tuple(x for x, _ in self.var_decls) + tuple(f for f, _, _ in self.fun_decls)


class _Parser:
    def __init__(self, toks):
        self.toks = toks
        self.pos = 0

    def peek(self) -> Token:
        return self.toks[self.pos]

    def next(self) -> Token:
        t = self.toks[self.pos]
        self.pos += 1
        return t

    def fail(self, message: str):
        t = self.peek()
        raise ParseError(message + (f" (found {t.text!r})" if t.text else " (at end)"),
                         t.line, t.col)

    def at(self, kind: str, text=None) -> bool:
        t = self.peek()
        return t.kind == kind and (text is None or t.text == text)

    def eat(self, kind: str, text=None) -> Token:
        if not self.at(kind, text):
            self.fail(f"expected {text or kind}")
        return self.next()

    def ident(self) -> str:
        t = self.eat("ident")
        if t.text in KEYWORDS:
            raise ParseError(f"{t.text!r} is a keyword", t.line, t.col)
        return t.text

    def ident_list(self) -> tuple:
        out = [self.ident()]
        while self.at("sym", ","):
            self.next()
            out.append(self.ident())
        return tuple(out)

    # -- module structure --

    def module(self) -> SourceModule:
        exports, imports = (), ()
        while self.at("ident", "export") or self.at("ident", "import"):
            kw = self.next().text
            names = self.ident_list()
            self.eat("sym", ";")
            if kw == "export":
                exports += names
            else:
                imports += names
        var_decls, fun_decls = [], []
        while self.at("ident", "decl"):
            self.next()
            name = self.ident()
            if self.at("sym", "("):
                fun_decls.append((name, *self.fun_rest()))
            else:
                init = 0
                if self.at("sym", "="):
                    self.next()
                    init = self.int_literal()
                self.eat("sym", ";")
                var_decls.append((name, init))
        if not self.at("eof"):
            self.fail("expected a declaration")
        return SourceModule(exports, imports, tuple(var_decls), tuple(fun_decls))

    def int_literal(self) -> int:
        negative = False
        if self.at("sym", "-"):
            self.next()
            negative = True
        t = self.eat("int")
        return -int(t.text) if negative else int(t.text)

    def fun_rest(self):
        self.eat("sym", "(")
        params = ()
        if self.at("ident"):
            params = self.ident_list()
        self.eat("sym", ")")
        self.eat("sym", "{")
        body = self.body()
        self.eat("sym", "}")
        return params, body

    # -- bodies and statements --

    def body(self):
        locals_ = []
        while self.at("ident", "local"):
            self.next()
            locals_.extend(self.ident_list())
            self.eat("sym", ";")
        items = []
        while not self.at("sym", "}") and not self.at("eof"):
            items.append(self.item())
        inner = seq(*items) if items else ()
        return seq(*(Local(x) for x in locals_), inner) if locals_ else inner

    def item(self):
        if self.at("ident", "if"):
            e = self.if_item()
        elif self.at("ident", "return"):
            self.next()
            e = self.exp()
        else:
            e = self.exp()
            if self.at("sym", "="):
                self.next()
                e = BinExp("=", e, self.exp())
        if self.at("sym", ";"):
            self.next()
        elif not self.at("sym", "}"):
            self.fail("expected ';'")
        return e

    def if_item(self):
        self.eat("ident", "if")
        self.eat("sym", "(")
        guard = self.exp()
        self.eat("sym", ")")
        self.eat("ident", "then")
        then_e = self.block()
        self.eat("ident", "else")
        else_e = self.block()
        return If(guard, then_e, else_e)

    def block(self):
        if self.at("sym", "{"):
            self.next()
            items = []
            while not self.at("sym", "}"):
                items.append(self.item())
            self.next()
            return seq(*items) if items else ()
        return self.exp()

    # -- expressions, loosest first --

    def exp(self):
        e = self.additive()
        while self.at("sym", "==") or self.at("sym", "<"):
            op = self.next().text
            e = BinExp(op, e, self.additive())
        return e

    def additive(self):
        e = self.unary()
        while self.at("sym", "+") or self.at("sym", "-"):
            op = self.next().text
            e = BinExp(op, e, self.unary())
        return e

    def unary(self):
        if self.at("sym", "*"):
            self.next()
            return Deref(self.unary())
        return self.postfix()

    def postfix(self):
        e = self.atom()
        while self.at("sym", "("):
            self.next()
            args = []
            if not self.at("sym", ")"):
                args.append(self.exp())
                while self.at("sym", ","):
                    self.next()
                    args.append(self.exp())
            self.eat("sym", ")")
            e = Call(e, self.args_exp(args))
        return e

    @staticmethod
    def args_exp(args: list):
        if not args:
            return ()
        e = args[0]
        for a in args[1:]:
            e = TupleExp(e, a)
        return e

    def atom(self):
        if self.at("int"):
            return int(self.next().text)
        if self.at("ident", "new"):
            self.next()
            self.eat("sym", "(")
            self.eat("sym", ")")
            return New()
        if self.at("ident"):
            return Var(self.ident())
        if self.at("sym", "("):
            self.next()
            if self.at("sym", ")"):
                self.next()
                return ()
            parts = [self.exp()]
            while self.at("sym", ","):
                self.next()
                parts.append(self.exp())
            self.eat("sym", ")")
            return self.args_exp(parts)
        self.fail("expected an expression")


def parse_module(src: str) -> SourceModule:
    p = _Parser(tokenize(src))
    mod = p.module()
    seen = set()
    for ident in mod.declared():
        if ident in seen:
            raise ParseError(f"duplicate declaration of {ident}", 0, 0)
        seen.add(ident)
    for ident in mod.imports:
        if ident in seen:
            raise ParseError(f"{ident} both declared and imported", 0, 0)
    for ident in mod.exports:
        if ident not in seen and ident not in mod.imports:
            raise ParseError(f"exported {ident} is not declared", 0, 0)
    return mod
