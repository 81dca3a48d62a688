"""Expression trees, runtime values, and evaluation frames.

Values are plain Python data: integers, names, the empty tuple for unit, and
flat tuples of width >= 2 for pairs and wider.  Tuples are kept flattened
(associativity) with units dropped, so `mk_tuple` is the only constructor
that should build them.  Expression nodes are frozen dataclasses with values
and `Var` (a bound identifier awaiting substitution) at the leaves.
"""

from __future__ import annotations

from dataclasses import dataclass

from .nominal import Name
from .store import FrozenMap, Store

BINOPS = ("+", "-", "==", "<")
OPS = BINOPS + ("=", ";")


# -- values -----------------------------------------------------------------

def is_value(x) -> bool:
    if isinstance(x, bool):
        return False
    if isinstance(x, (int, Name)):
        return True
    return isinstance(x, tuple) and all(is_value(p) and not isinstance(p, tuple) for p in x)


def mk_tuple(*parts):
    """Canonical tuple value: flatten nested tuples, drop units, unwrap
    singletons.  mk_tuple() is unit."""
    flat = []
    for p in parts:
        if isinstance(p, tuple):
            flat.extend(p)
        else:
            flat.append(p)
    if len(flat) == 1:
        return flat[0]
    return tuple(flat)


def value_width(v) -> int:
    if isinstance(v, tuple):
        return len(v)
    return 1


# -- expressions ------------------------------------------------------------

@dataclass(frozen=True)
class Var:
    ident: str


@dataclass(frozen=True)
class Deref:
    exp: "Exp"


@dataclass(frozen=True)
class BinExp:
    """e1 op e2 for op in +,-,==,< plus assignment "=" and sequencing ";"."""
    op: str
    left: "Exp"
    right: "Exp"


@dataclass(frozen=True)
class If:
    guard: "Exp"
    then_exp: "Exp"
    else_exp: "Exp"


@dataclass(frozen=True)
class Call:
    fn: "Exp"
    arg: "Exp"


@dataclass(frozen=True)
class TupleExp:
    left: "Exp"
    right: "Exp"


@dataclass(frozen=True)
class New:
    pass


@dataclass(frozen=True)
class Local:
    """`local x` in control position allocates a cell and substitutes it for
    x in the rest of the enclosing sequence."""
    ident: str


Exp = object  # int | Name | tuple | Var | Deref | BinExp | If | Call | TupleExp | New | Local


def seq(*exps):
    """Right-nested sequencing; the last expression's value is the result."""
    if not exps:
        return ()
    out = exps[-1]
    for e in reversed(exps[:-1]):
        out = BinExp(";", e, out)
    return out


def subst(e, env: dict):
    """Replace Var leaves by values.  `local` binders shadow: the rest of a
    sequence under `local x` does not see an outer binding of x."""
    if not env:
        return e
    if isinstance(e, Var):
        return env.get(e.ident, e)
    if isinstance(e, (int, Name)) or e == ():
        return e
    if isinstance(e, tuple):
        return tuple(subst(p, env) for p in e)
    if isinstance(e, Deref):
        return Deref(subst(e.exp, env))
    if isinstance(e, BinExp):
        if e.op == ";" and isinstance(e.left, Local) and e.left.ident in env:
            inner = {k: v for k, v in env.items() if k != e.left.ident}
            return BinExp(";", e.left, subst(e.right, inner))
        return BinExp(e.op, subst(e.left, env), subst(e.right, env))
    if isinstance(e, If):
        return If(subst(e.guard, env), subst(e.then_exp, env), subst(e.else_exp, env))
    if isinstance(e, Call):
        return Call(subst(e.fn, env), subst(e.arg, env))
    if isinstance(e, TupleExp):
        return TupleExp(subst(e.left, env), subst(e.right, env))
    if isinstance(e, (New, Local)):
        return e
    raise TypeError(f"not an expression: {e!r}")


# -- frames -----------------------------------------------------------------

@dataclass(frozen=True)
class FIf:
    then_exp: "Exp"
    else_exp: "Exp"


@dataclass(frozen=True)
class FOpL:
    op: str
    right: "Exp"


@dataclass(frozen=True)
class FOpR:
    op: str
    left: "Exp"  # already a value


@dataclass(frozen=True)
class FDeref:
    pass


@dataclass(frozen=True)
class FCallF:
    arg: "Exp"


@dataclass(frozen=True)
class FCallA:
    fn: "Exp"  # already a value


@dataclass(frozen=True)
class FTupL:
    right: "Exp"


@dataclass(frozen=True)
class FTupR:
    left: "Exp"  # already a value


Frame = object
FrameStack = tuple  # top of stack at the end


def plug(frame, e):
    """Fill a frame's hole with an expression; inverse of decomposition."""
    if isinstance(frame, FIf):
        return If(e, frame.then_exp, frame.else_exp)
    if isinstance(frame, FOpL):
        return BinExp(frame.op, e, frame.right)
    if isinstance(frame, FOpR):
        return BinExp(frame.op, frame.left, e)
    if isinstance(frame, FDeref):
        return Deref(e)
    if isinstance(frame, FCallF):
        return Call(e, frame.arg)
    if isinstance(frame, FCallA):
        return Call(frame.fn, e)
    if isinstance(frame, FTupL):
        return TupleExp(e, frame.right)
    if isinstance(frame, FTupR):
        return TupleExp(frame.left, e)
    raise TypeError(f"not a frame: {frame!r}")


# -- rendering --------------------------------------------------------------

def render_exp(e) -> str:
    if isinstance(e, bool):
        raise TypeError("booleans are not values")
    if isinstance(e, int):
        return str(e)
    if isinstance(e, Name):
        return str(e)
    if e == ():
        return "()"
    if isinstance(e, tuple):
        return "(" + ",".join(render_exp(p) for p in e) + ")"
    if isinstance(e, Var):
        return e.ident
    if isinstance(e, Deref):
        return f"*{_atom(e.exp)}"
    if isinstance(e, BinExp):
        if e.op == ";":
            return f"{render_exp(e.left)}; {render_exp(e.right)}"
        return f"{_atom(e.left)} {e.op} {_atom(e.right)}"
    if isinstance(e, If):
        return (f"if ({render_exp(e.guard)}) then {{{render_exp(e.then_exp)}}}"
                f" else {{{render_exp(e.else_exp)}}}")
    if isinstance(e, Call):
        return f"{_atom(e.fn)}({render_exp(e.arg)})"
    if isinstance(e, TupleExp):
        return f"({render_exp(e.left)},{render_exp(e.right)})"
    if isinstance(e, New):
        return "new()"
    if isinstance(e, Local):
        return f"local {e.ident}"
    raise TypeError(f"not an expression: {e!r}")


def _atom(e) -> str:
    text = render_exp(e)
    if isinstance(e, (BinExp, If, Local)):
        return f"({text})"
    return text


HOLE = "□"  # the hole marker in frame rendering


def render_frame(f) -> str:
    return render_exp(plug(f, Var(HOLE)))


def render_frames(frames: tuple) -> str:
    if not frames:
        return "-"
    return "∘".join(render_frame(f) for f in frames)


def render_store(s: Store) -> str:
    """Canonical text form: name=value pairs sorted by rendered name."""
    parts = []
    for k, v in s.locs.items:
        parts.append((str(k), f"{k}={render_exp(v)}"))
    for k, (frames, tail) in s.conts.items:
        parts.append((str(k), f"{k}=({render_frames(frames)},{tail})"))
    return ",".join(text for _, text in sorted(parts))


# -- resolved modules --------------------------------------------------------

@dataclass(frozen=True)
class FunDef:
    params: tuple  # tuple[str, ...]
    body: "Exp"


@dataclass(frozen=True)
class ResolvedModule:
    """A module after identifiers became names: the interface sets, the
    module-level binding of identifiers to names, function definitions, and
    the store of initialised cells."""

    exports: frozenset
    imports: frozenset
    name_of: FrozenMap  # ident -> Name, module level
    defs: FrozenMap  # Name(FUN) -> FunDef
    init_store: Store

    @property
    def used(self) -> frozenset:
        return self.exports | self.imports | frozenset(v for _, v in self.name_of.items)

    @property
    def public(self) -> frozenset:
        return self.exports | self.imports

    def ident_of(self, n: Name):
        for ident, name in self.name_of.items:
            if name == n:
                return ident
        return None


def lookup_def(m: ResolvedModule, f: Name):
    return m.defs.get(f)
