"""From identifiers to names, and source-level module composition.

Interface identifiers (exports and imports) are resolved first, shared
across a batch, so that two modules mentioning the same `g` agree on the
atom for it; each module's remaining declarations then draw fresh names
from a common pool, which keeps the modules' private names disjoint.  An
identifier declared as a variable resolves to a location name, everything
else on an interface resolves to a function name.
"""

from __future__ import annotations

from .lang import (BinExp, Call, Deref, FunDef, If, Local, New, ResolvedModule,
                   TupleExp, Var, subst)
from .machine import wrap64
from .nominal import Name, Sort, fresh
from .parser import SourceModule
from .store import FrozenMap, Store


class ResolveError(ValueError):
    pass


class ComposeError(ValueError):
    pass


def _decl_sorts(sources) -> dict:
    sorts = {}
    for src in sources:
        for ident, _ in src.var_decls:
            sorts[ident] = Sort.LOC
        for ident, _, _ in src.fun_decls:
            sorts[ident] = Sort.FUN
    return sorts


def resolve_modules(sources) -> list:
    """Resolve a batch of parsed modules against one shared name pool."""
    decl_sort = _decl_sorts(sources)
    env: dict = {}  # ident -> Name, interface identifiers shared batch-wide
    pool: set = set()

    def draw(ident: str, sort: Sort) -> Name:
        n = fresh(sort, pool)
        pool.add(n)
        env[ident] = n
        return n

    for src in sources:
        for ident in src.exports + src.imports:
            if ident in env:
                continue
            draw(ident, decl_sort.get(ident, Sort.FUN))

    out = []
    for src in sources:
        local_env = dict(env)

        def draw_private(ident: str, sort: Sort) -> Name:
            n = fresh(sort, pool)
            pool.add(n)
            local_env[ident] = n
            return n

        for ident, _ in src.var_decls:
            if ident not in src.exports:
                draw_private(ident, Sort.LOC)
        for ident, _, _ in src.fun_decls:
            if ident not in src.exports:
                draw_private(ident, Sort.FUN)

        init = {}
        for ident, value in src.var_decls:
            init[local_env[ident]] = wrap64(value)

        defs = {}
        for ident, params, body in src.fun_decls:
            if len(set(params)) != len(params):
                raise ResolveError(f"{ident}: repeated parameter")
            module_env = {k: v for k, v in local_env.items() if k not in params}
            resolved = subst(body, module_env)
            _check_closed(resolved, set(params), ident)
            defs[local_env[ident]] = FunDef(params, resolved)

        module_idents = (set(src.exports) | set(src.imports)
                         | {x for x, _ in src.var_decls} | {f for f, _, _ in src.fun_decls})
        out.append(ResolvedModule(
            exports=frozenset(env[x] for x in src.exports),
            imports=frozenset(env[x] for x in src.imports),
            name_of=FrozenMap.of({x: local_env[x] for x in module_idents}),
            defs=FrozenMap.of(defs),
            init_store=Store.of(locs=init),
        ))
    return out


def resolve_and_desugar(src: SourceModule) -> ResolvedModule:
    return resolve_modules([src])[0]


def resolve_pair(src1: SourceModule, src2: SourceModule) -> tuple:
    a, b = resolve_modules([src1, src2])
    return a, b


def _check_closed(e, bound: set, where: str):
    """Every Var left after resolution must be a parameter or a local."""
    if isinstance(e, Var):
        if e.ident not in bound:
            raise ResolveError(f"{where}: unbound identifier {e.ident}")
    elif isinstance(e, Deref):
        _check_closed(e.exp, bound, where)
    elif isinstance(e, BinExp):
        if e.op == ";" and isinstance(e.left, Local):
            _check_closed(e.right, bound | {e.left.ident}, where)
        else:
            _check_closed(e.left, bound, where)
            _check_closed(e.right, bound, where)
    elif isinstance(e, If):
        for part in (e.guard, e.then_exp, e.else_exp):
            _check_closed(part, bound, where)
    elif isinstance(e, Call):
        _check_closed(e.fn, bound, where)
        _check_closed(e.arg, bound, where)
    elif isinstance(e, TupleExp):
        _check_closed(e.left, bound, where)
        _check_closed(e.right, bound, where)
    elif isinstance(e, tuple) and e != ():
        for part in e:
            _check_closed(part, bound, where)
    # values, New, bare Local: nothing to check


def _rename_idents(e, mapping: dict, bound: frozenset):
    """Rename free module-level identifiers; parameters and locals shadow."""
    if isinstance(e, Var):
        if e.ident in bound:
            return e
        return Var(mapping.get(e.ident, e.ident))
    if isinstance(e, Deref):
        return Deref(_rename_idents(e.exp, mapping, bound))
    if isinstance(e, BinExp):
        if e.op == ";" and isinstance(e.left, Local):
            return BinExp(";", e.left,
                          _rename_idents(e.right, mapping, bound | {e.left.ident}))
        return BinExp(e.op, _rename_idents(e.left, mapping, bound),
                      _rename_idents(e.right, mapping, bound))
    if isinstance(e, If):
        return If(_rename_idents(e.guard, mapping, bound),
                  _rename_idents(e.then_exp, mapping, bound),
                  _rename_idents(e.else_exp, mapping, bound))
    if isinstance(e, Call):
        return Call(_rename_idents(e.fn, mapping, bound),
                    _rename_idents(e.arg, mapping, bound))
    if isinstance(e, TupleExp):
        return TupleExp(_rename_idents(e.left, mapping, bound),
                        _rename_idents(e.right, mapping, bound))
    if isinstance(e, tuple) and e != ():
        return tuple(_rename_idents(p, mapping, bound) for p in e)
    return e


def _all_idents(src: SourceModule) -> set:
    out = set(src.exports) | set(src.imports) | set(src.declared())
    def walk(e):
        if isinstance(e, Var):
            out.add(e.ident)
        elif isinstance(e, Local):
            out.add(e.ident)
        elif isinstance(e, Deref):
            walk(e.exp)
        elif isinstance(e, (BinExp, TupleExp)):
            walk(e.left)
            walk(e.right)
        elif isinstance(e, If):
            walk(e.guard), walk(e.then_exp), walk(e.else_exp)
        elif isinstance(e, Call):
            walk(e.fn), walk(e.arg)
        elif isinstance(e, tuple):
            for p in e:
                walk(p)
    for ident, params, body in src.fun_decls:
        out.update(params)
        walk(body)
    return out


def _apply_renaming(src: SourceModule, mapping: dict) -> SourceModule:
    if not mapping:
        return src
    return SourceModule(
        exports=tuple(mapping.get(x, x) for x in src.exports),
        imports=tuple(mapping.get(x, x) for x in src.imports),
        var_decls=tuple((mapping.get(x, x), v) for x, v in src.var_decls),
        fun_decls=tuple((mapping.get(f, f), params,
                         _rename_idents(body, mapping, frozenset(params)))
                        for f, params, body in src.fun_decls),
    )


def syntactic_compose(src1: SourceModule, src2: SourceModule) -> SourceModule:
    """Source-level union: concatenated declarations, imports satisfied by
    the other side's exports dropped, clashing private identifiers renamed."""
    clash = set(src1.exports) & set(src2.exports)
    if clash:
        raise ComposeError(f"both modules export {', '.join(sorted(clash))}")

    universe = _all_idents(src1) | _all_idents(src2)

    def freshen(ident: str) -> str:
        i = 1
        while f"{ident}_{i}" in universe:
            i += 1
        out = f"{ident}_{i}"
        universe.add(out)
        return out

    ren1 = {}
    other = _all_idents(src2)
    for ident in src1.declared():
        if ident not in src1.exports and ident in other:
            ren1[ident] = freshen(ident)
    src1 = _apply_renaming(src1, ren1)

    ren2 = {}
    other = _all_idents(src1)
    for ident in src2.declared():
        if ident not in src2.exports and ident in other:
            ren2[ident] = freshen(ident)
    src2 = _apply_renaming(src2, ren2)

    exports = src1.exports + src2.exports
    imports = tuple(dict.fromkeys(src1.imports + src2.imports))
    imports = tuple(x for x in imports if x not in exports)
    return SourceModule(
        exports=exports,
        imports=imports,
        var_decls=src1.var_decls + src2.var_decls,
        fun_decls=src1.fun_decls + src2.fun_decls,
    )
