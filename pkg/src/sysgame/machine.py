"""Small-step frame-stack machine for module-internal evaluation.

A program configuration carries the used-name set N, the public-name set P,
the store, a stack of evaluation frames, the control (an expression or a
value), and the continuation name to return to.  `step` performs exactly one
transition; boundary crossings and crashes are reported as outcomes, never
raised.  Freshness is deterministic (least unused index), with an optional
avoid-set so an embedding engine can keep two modules' names disjoint.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace

from .lang import (BINOPS, BinExp, Call, Deref, FCallA, FCallF, FDeref, FIf,
                   FOpL, FOpR, FTupL, FTupR, FunDef, If, Local, New,
                   ResolvedModule, TupleExp, Var, is_value, lookup_def,
                   mk_tuple, subst)
from .nominal import EMPTY, Name, Sort, fresh
from .store import Store

WORD = 1 << 64
HALF = 1 << 63


def wrap64(n: int) -> int:
    return (n + HALF) % WORD - HALF


class CrashReason(enum.Enum):
    DEREF_UNBOUND = "DerefUnbound"
    NOT_A_LOCATION = "NotALocation"
    BAD_OPERANDS = "BadOperands"
    CALL_NON_FUNCTION = "CallNonFunction"


@dataclass(frozen=True)
class ProgramConfig:
    used: frozenset
    public: frozenset
    store: Store
    frames: tuple
    control: object
    ret_cont: Name


@dataclass(frozen=True)
class Internal:
    config: ProgramConfig


@dataclass(frozen=True)
class NeedsSystemCall:
    fn: Name
    arg: object
    frames: tuple  # residual stack below the call frame
    k: Name


@dataclass(frozen=True)
class NeedsSystemReturn:
    value: object
    k: Name


@dataclass(frozen=True)
class Crash:
    reason: CrashReason
    detail: str = ""


@dataclass(frozen=True)
class Divergent:
    steps: int


def _storable(v) -> bool:
    if isinstance(v, bool):
        return False
    if isinstance(v, int):
        return True
    return isinstance(v, Name) and v.sort in (Sort.LOC, Sort.FUN)


def _binop(op: str, a, b):
    """Integer arithmetic wraps at 64 bits.  == compares names for identity
    and treats a name/integer mix as unequal; < wants integers."""
    ints = isinstance(a, int) and isinstance(b, int)
    if op == "+":
        if ints:
            return wrap64(a + b)
    elif op == "-":
        if ints:
            return wrap64(a - b)
    elif op == "<":
        if ints:
            return 1 if a < b else 0
    elif op == "==":
        if ints:
            return 1 if a == b else 0
        if isinstance(a, Name) and isinstance(b, Name):
            return 1 if a == b else 0
        if isinstance(a, Name) or isinstance(b, Name):
            if isinstance(a, (int, Name)) and isinstance(b, (int, Name)):
                return 0
    return Crash(CrashReason.BAD_OPERANDS, f"{op} on unsuitable operands")


def _bind_params(d: FunDef, arg):
    """Point-wise parameter binding: nullary wants (), unary takes the whole
    argument, wider parameter lists want a tuple of exactly that width."""
    n = len(d.params)
    if n == 0:
        return {} if arg == () else None
    if n == 1:
        return {d.params[0]: arg}
    if isinstance(arg, tuple) and len(arg) == n:
        return dict(zip(d.params, arg))
    return None


def step(c: ProgramConfig, m: ResolvedModule, avoid: frozenset = EMPTY):
    e = c.control
    s = c.store

    if is_value(e):
        if not c.frames:
            return NeedsSystemReturn(e, c.ret_cont)
        top = c.frames[-1]
        rest = c.frames[:-1]

        if isinstance(top, FIf):
            if isinstance(e, int) and not isinstance(e, bool):
                branch = top.then_exp if e != 0 else top.else_exp
                return Internal(replace(c, frames=rest, control=branch))
            return Crash(CrashReason.BAD_OPERANDS, "if-guard is not an integer")

        if isinstance(top, FOpL):
            return Internal(replace(c, frames=rest + (FOpR(top.op, e),), control=top.right))

        if isinstance(top, FOpR):
            if top.op == ";":
                return Internal(replace(c, frames=rest, control=e))
            if top.op == "=":
                a = top.left
                if not (isinstance(a, Name) and a.sort is Sort.LOC):
                    return Crash(CrashReason.NOT_A_LOCATION, "assignment to a non-location")
                if not _storable(e):
                    return Crash(CrashReason.BAD_OPERANDS, "value cannot live in a cell")
                return Internal(replace(c, store=s.set_loc(a, e), frames=rest, control=()))
            out = _binop(top.op, top.left, e)
            if isinstance(out, Crash):
                return out
            return Internal(replace(c, frames=rest, control=out))

        if isinstance(top, FDeref):
            if not (isinstance(e, Name) and e.sort is Sort.LOC):
                return Crash(CrashReason.NOT_A_LOCATION, "dereference of a non-location")
            v = s.loc(e)
            if v is None:
                return Crash(CrashReason.DEREF_UNBOUND, f"{e} is not bound")
            return Internal(replace(c, frames=rest, control=v))

        if isinstance(top, FCallF):
            return Internal(replace(c, frames=rest + (FCallA(e),), control=top.arg))

        if isinstance(top, FCallA):
            f = top.fn
            if not (isinstance(f, Name) and f.sort is Sort.FUN):
                return Crash(CrashReason.CALL_NON_FUNCTION, "call target is not a function name")
            d = lookup_def(m, f)
            if d is None:
                return NeedsSystemCall(f, e, rest, c.ret_cont)
            env = _bind_params(d, e)
            if env is None:
                return Crash(CrashReason.BAD_OPERANDS,
                             f"{f} takes {len(d.params)} parameter(s)")
            return Internal(replace(c, frames=rest, control=subst(d.body, env)))

        if isinstance(top, FTupL):
            return Internal(replace(c, frames=rest + (FTupR(e),), control=top.right))

        if isinstance(top, FTupR):
            return Internal(replace(c, frames=rest, control=mk_tuple(top.left, e)))

        raise TypeError(f"unknown frame {top!r}")

    if isinstance(e, Local):
        if c.frames and isinstance(c.frames[-1], FOpL) and c.frames[-1].op == ";":
            scope = c.frames[-1].right
            a = fresh(Sort.LOC, c.used | avoid)
            return Internal(replace(
                c, used=c.used | {a}, store=s.set_loc(a, 0),
                frames=c.frames[:-1], control=subst(scope, {e.ident: a})))
        return Crash(CrashReason.BAD_OPERANDS, "local outside a sequence")

    if isinstance(e, New):
        a = fresh(Sort.LOC, c.used | avoid)
        return Internal(replace(c, used=c.used | {a}, store=s.set_loc(a, 0), control=a))

    if isinstance(e, BinExp):
        return Internal(replace(c, frames=c.frames + (FOpL(e.op, e.right),), control=e.left))
    if isinstance(e, If):
        return Internal(replace(c, frames=c.frames + (FIf(e.then_exp, e.else_exp),),
                                control=e.guard))
    if isinstance(e, Deref):
        return Internal(replace(c, frames=c.frames + (FDeref(),), control=e.exp))
    if isinstance(e, Call):
        return Internal(replace(c, frames=c.frames + (FCallF(e.arg),), control=e.fn))
    if isinstance(e, TupleExp):
        return Internal(replace(c, frames=c.frames + (FTupL(e.right),), control=e.left))
    if isinstance(e, Var):
        return Crash(CrashReason.BAD_OPERANDS, f"unbound identifier {e.ident}")
    raise TypeError(f"not a control term: {e!r}")


def run_to_boundary(c: ProgramConfig, m: ResolvedModule, fuel: int = 10_000,
                    avoid: frozenset = EMPTY):
    """Iterate `step` until a boundary, a crash, or fuel runs out.
    Returns (last config, outcome, steps taken)."""
    steps = 0
    while steps < fuel:
        r = step(c, m, avoid)
        if not isinstance(r, Internal):
            return c, r, steps
        c = r.config
        steps += 1
    return c, Divergent(steps), steps
