"""Operads as collections with units and composition, their monoid form, and free operads."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Mapping

from ..fincat import CapExceeded, CategoryError, SetFunctor, ekey, is_natural
from ..fmulti import FMulticategory, LaxFunctor, to_double
from ..report import Report
from .collections import (Collection, Composite, UnitCollection, compose_collections, sum_collections,
                          unit_collection)


class OperadData:
    """units[X] in O(1_X); comp[(p, x)] in O(comp p) for each composable tuple p
    and x = (o, (o_1..o_n)) in O(f) x prod O(g_i)."""

    def __init__(self, coll: Collection, units: Mapping[str, Any], comp: Mapping[tuple, Any]):
        self.coll = coll
        self.m = coll.m
        self.units = dict(units)
        self.comp = dict(comp)

    def compose(self, f: str, gs: tuple, o: Any, os: tuple) -> Any:
        return self.comp[self.m.p_ob_id(f, gs), (o, tuple(os))]

    def with_comp(self, key: tuple, value: Any) -> "OperadData":
        comp = dict(self.comp)
        comp[key] = value
        return OperadData(self.coll, self.units, comp)

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, OperadData) and self.coll == other.coll and self.units == other.units
                and self.comp == other.comp)

    def to_json(self) -> dict:
        doc = self.coll.to_json()
        doc["units"] = {x: str(e) for x, e in sorted(self.units.items())}
        doc["comp"] = [{"tuple": p, "args": [str(x[0])] + [str(y) for y in x[1]], "value": str(v)}
                       for (p, x), v in sorted(self.comp.items(), key=ekey)]
        return doc


def operad_from_json(m: FMulticategory, doc: Mapping) -> OperadData:
    """Elements are read as strings."""
    from .collections import collection_from_json
    coll = collection_from_json(m, doc)
    comp = {}
    for row in doc.get("comp", []):
        args = [str(a) for a in row["args"]]
        comp[row["tuple"], (args[0], tuple(args[1:]))] = str(row["value"])
    return OperadData(coll, {x: str(e) for x, e in doc["units"].items()}, comp)


def operad_from_function(coll: Collection, units: Mapping[str, Any], fn) -> OperadData:
    """Tabulate fn(f, gs, o, os) over every bounded composable tuple."""
    m = coll.m
    comp = {}
    for p, (f, gs) in m.composable.meta["ob"].items():
        for o in coll(f):
            for os in itertools.product(*(coll(g) for g in gs)):
                comp[p, (o, os)] = fn(f, gs, o, os)
    return OperadData(coll, units, comp)


def terminal_operad(m: FMulticategory) -> OperadData:
    from .collections import terminal_collection
    t = terminal_collection(m)
    return operad_from_function(t, {x: "*" for x in m.m0.objects}, lambda *a: "*")


# -- axioms

def check_operad(o: OperadData) -> Report:
    m, s = o.m, o.coll
    p = m.composable
    obdata, mdata = p.meta["ob"], p.meta["mor"]
    rep = Report(f"operad over {m.name}", arity_bound=m.bound)
    w = None
    for x in m.m0.objects:
        if o.units.get(x) not in s(m.one(x)):
            w = ("unit outside O(1_X)", x)
            break
    if w is None:
        for q, (f, gs) in obdata.items():
            target = set(s(m.comp.ob[q]))
            for a in s(f):
                for bs in itertools.product(*(s(g) for g in gs)):
                    if (q, (a, bs)) not in o.comp:
                        w = ("composition undefined", q, a, bs)
                    elif o.comp[q, (a, bs)] not in target:
                        w = ("composite outside O(comp p)", q, a, bs)
                    if w:
                        break
                if w:
                    break
            if w:
                break
    rep.add("well-formed", w)
    if w is not None:
        return rep
    w = None
    for v in m.m0.morphisms:
        if s.act(m.one_mor(v), o.units[m.m0.tgt[v]]) != o.units[m.m0.src[v]]:
            w = ("unit naturality", v)
            break
    if w is None:
        for mid, (u, vs, q, q2) in mdata.items():
            f2, gs2 = obdata[q2]
            alpha = m.src_mor[u].index_map
            cu = m.comp.mor[mid]
            for a in s(f2):
                for bs in itertools.product(*(s(g) for g in gs2)):
                    lhs = o.comp[q, (s.act(u, a), tuple(s.act(v, bs[j]) for v, j in zip(vs, alpha)))]
                    rhs = s.act(cu, o.comp[q2, (a, bs)])
                    if lhs != rhs:
                        w = ("composition naturality", mid, a, bs)
                        break
                if w:
                    break
            if w:
                break
    rep.add("naturality", w)
    rep.add("associativity", _operad_assoc_witness(o))
    rep.add("unitality", _operad_unit_witness(o))
    return rep


def _two_level(m: FMulticategory):
    """Yield (f, gs, hss) with every level inside the bound."""
    p = m.composable
    obdata, by_first = p.meta["ob"], p.meta["by_first"]
    for q, (f, gs) in obdata.items():
        choices = [[obdata[r][1] for r in by_first.get(g, [])] for g in gs]
        for hss in itertools.product(*choices):
            flat = tuple(h for hs in hss for h in hs)
            inner = tuple(m.compose(g, hs) for g, hs in zip(gs, hss))
            if (m.p_ob_id(m.compose(f, gs), flat) not in p.ident
                    or m.p_ob_id(f, inner) not in p.ident):
                continue
            yield f, gs, hss


def _operad_assoc_witness(o: OperadData):
    m, s = o.m, o.coll
    for f, gs, hss in _two_level(m):
        fg = m.compose(f, gs)
        flat = tuple(h for hs in hss for h in hs)
        inner = tuple(m.compose(g, hs) for g, hs in zip(gs, hss))
        for a in s(f):
            for bs in itertools.product(*(s(g) for g in gs)):
                left0 = o.compose(f, gs, a, bs)
                for cs in itertools.product(*(itertools.product(*(s(h) for h in hs)) for hs in hss)):
                    left = o.compose(fg, flat, left0, tuple(c for blk in cs for c in blk))
                    right = o.compose(f, inner, a, tuple(o.compose(g, hs, b, blk)
                                                         for g, hs, b, blk in zip(gs, hss, bs, cs)))
                    if left != right:
                        return ("associativity", f, gs, hss, a, bs, cs)
    return None


def _operad_unit_witness(o: OperadData):
    m, s = o.m, o.coll
    for f in m.m1.objects:
        ones = tuple(m.one(x) for x in m.src_ob[f])
        t1 = m.one(m.t(f))
        for a in s(f):
            if o.compose(t1, (f,), o.units[m.t(f)], (a,)) != a:
                return ("left unit", f, a)
            if o.compose(f, ones, a, tuple(o.units[x] for x in m.src_ob[f])) != a:
                return ("right unit", f, a)
    return None


def is_operad(o: OperadData) -> bool:
    return check_operad(o).ok


# -- operads as monoids for the composition product

@dataclass
class Monoid:
    coll: Collection
    composite: Composite
    j: UnitCollection
    mult: dict[str, dict]
    unit: dict[str, dict]


def operad_as_monoid(o: OperadData) -> Monoid:
    """mult sends the class of (p, w, x) to O(w)(comp_p x); the value does not
    depend on the representative by naturality of the composition."""
    s, m = o.coll, o.m
    cp = compose_collections(s, s, assume_supported=True)
    mult = {}
    for f in m.m1.objects:
        mf = {}
        for c in cp.sets[f]:
            vals = {s.act(w, o.comp[p, x]) for (p, w, x) in cp.members(f, c)}
            if len(vals) != 1:
                raise CategoryError(f"composition is not natural: class {c!r} has images {vals}")
            mf[c] = vals.pop()
        mult[f] = mf
    j = unit_collection(m)
    unit = {}
    for f in m.m1.objects:
        uf = {}
        for c in j.sets[f]:
            vals = {s.act(w, o.units[x]) for (x, w, _) in j.kan.colims[f].classes[c]}
            if len(vals) != 1:
                raise CategoryError(f"units are not natural at {c!r}")
            uf[c] = vals.pop()
        unit[f] = uf
    return Monoid(s, cp, j, mult, unit)


def monoid_as_operad(mon: Monoid) -> OperadData:
    m, cp = mon.coll.m, mon.composite
    comp = {}
    for p, (f, gs) in m.composable.meta["ob"].items():
        fp = m.comp.ob[p]
        for x in cp.x.sets[p]:
            comp[p, x] = mon.mult[fp][cp.inj(p, x)]
    units = {x: mon.unit[m.one(x)][mon.j.cls(x, m.m1.ident[m.one(x)])] for x in m.m0.objects}
    return OperadData(mon.coll, units, comp)


def monoid_structure(coll: Collection, mult: Mapping[str, Mapping], unit: Mapping[str, Mapping],
                     composite: Composite | None = None, j: UnitCollection | None = None) -> Monoid:
    cp = composite or compose_collections(coll, coll, assume_supported=True)
    return Monoid(coll, cp, j or unit_collection(coll.m), {f: dict(v) for f, v in mult.items()},
                  {f: dict(v) for f, v in unit.items()})


def check_monoid(mon: Monoid) -> Report:
    """Naturality, then associativity and unit laws on the generating elements
    of the triple and unit composites."""
    m, s, cp = mon.coll.m, mon.coll, mon.composite
    rep = Report(f"monoid over {m.name}", arity_bound=m.bound)
    w = None
    if not is_natural(cp.functor, s.functor, mon.mult):
        w = "multiplication is not natural"
    elif not is_natural(mon.j.functor, s.functor, mon.unit):
        w = "unit is not natural"
    rep.add("naturality", w)
    if w is not None:
        return rep

    def mul(f, gs, a, bs):
        p = m.p_ob_id(f, gs)
        return mon.mult[m.comp.ob[p]][cp.inj(p, (a, tuple(bs)))]

    w = None
    for f, gs, hss in _two_level(m):
        fg = m.compose(f, gs)
        flat = tuple(h for hs in hss for h in hs)
        inner = tuple(m.compose(g, hs) for g, hs in zip(gs, hss))
        for a in s(f):
            for bs in itertools.product(*(s(g) for g in gs)):
                left0 = mul(f, gs, a, bs)
                for cs in itertools.product(*(itertools.product(*(s(h) for h in hs)) for hs in hss)):
                    left = mul(fg, flat, left0, [c for blk in cs for c in blk])
                    right = mul(f, inner, a, [mul(g, hs, b, blk) for g, hs, b, blk in zip(gs, hss, bs, cs)])
                    if left != right:
                        w = ("associativity", f, gs, hss, a, bs, cs)
                        break
                if w:
                    break
            if w:
                break
        if w:
            break
    rep.add("associativity", w)
    w = None
    eta = {x: mon.unit[m.one(x)][mon.j.cls(x, m.m1.ident[m.one(x)])] for x in m.m0.objects}
    for f in m.m1.objects:
        ones = tuple(m.one(x) for x in m.src_ob[f])
        for a in s(f):
            if mul(m.one(m.t(f)), (f,), eta[m.t(f)], (a,)) != a:
                w = ("left unit", f, a)
            elif mul(f, ones, a, [eta[x] for x in m.src_ob[f]]) != a:
                w = ("right unit", f, a)
            if w:
                break
        if w:
            break
    rep.add("unitality", w)
    return rep


def unit_operad_on(j: UnitCollection) -> OperadData:
    """The unit operad on J.

    For a = [x, wa : f -> 1_x] and b_i = [x, v_i : g_i -> 1_x] with t(v_i) the
    i-th source component of wa, (wa, (v_i)) is a morphism of composable tuples
    into (1_x, (1_x)) and the composite is [x, comp(wa, (v_i))].
    """
    m = j.m
    p = m.composable
    comp = {}
    for q, (f, gs) in p.meta["ob"].items():
        for a in j(f):
            for bs in itertools.product(*(j(g) for g in gs)):
                comp[q, (a, bs)] = _unit_compose(j, q, f, gs, a, bs)
    units = {x: j.cls(x, m.m1.ident[m.one(x)]) for x in m.m0.objects}
    return OperadData(j, units, comp)


def _unit_compose(j: UnitCollection, q, f, gs, a, bs):
    m = j.m
    for (x, wa, _) in j.kan.colims[f].classes[a]:
        comps = m.src_mor[wa].components
        q2 = m.p_ob_id(m.one(x), (m.one(x),)) if m.arity(m.one(x)) == 1 else None
        if q2 is None or q2 not in m.composable.ident:
            continue
        vs = []
        for g, b, c in zip(gs, bs, comps):
            found = [w for (y, w, _) in j.kan.colims[g].classes[b] if y == x and m.t_mor(w) == c]
            if not found:
                break
            vs.append(found[0])
        else:
            pm = m.p_mor_id(wa, tuple(vs), q2)
            if pm in m.composable.src:
                return j.cls(x, m.comp.mor[pm])
    raise CategoryError(f"no composite for the unit classes at {q}")


def unit_operad(m: FMulticategory) -> OperadData:
    return unit_operad_on(unit_collection(m))


# -- exhaustive structure counts

def all_operad_structures(coll: Collection, cap: int = 1 << 16) -> list[OperadData]:
    m = coll.m
    p = m.composable
    slots = []
    for q, (f, gs) in p.meta["ob"].items():
        tgt = coll(m.comp.ob[q])
        for a in coll(f):
            for bs in itertools.product(*(coll(g) for g in gs)):
                slots.append(((q, (a, bs)), tgt))
    unit_choices = [coll(m.one(x)) for x in m.m0.objects]
    total = 1
    for _, tgt in slots:
        total *= max(len(tgt), 1)
    for u in unit_choices:
        total *= max(len(u), 1)
    if total > cap:
        raise CapExceeded(f"{total} candidate operad structures exceed the cap {cap}")
    out = []
    for us in itertools.product(*unit_choices):
        units = dict(zip(m.m0.objects, us))
        for vals in itertools.product(*(tgt for _, tgt in slots)):
            o = OperadData(coll, units, {k: v for (k, _), v in zip(slots, vals)})
            if check_operad(o).ok:
                out.append(o)
    return out


def all_monoid_structures(coll: Collection, cap: int = 1 << 16) -> list[Monoid]:
    m = coll.m
    cp = compose_collections(coll, coll, assume_supported=True)
    j = unit_collection(m)
    mult_slots = [(f, c) for f in m.m1.objects for c in cp.sets[f]]
    unit_slots = [(f, c) for f in m.m1.objects for c in j.sets[f]]
    total = 1
    for f, _ in mult_slots + unit_slots:
        total *= max(len(coll(f)), 1)
    if total > cap:
        raise CapExceeded(f"{total} candidate monoid structures exceed the cap {cap}")
    out = []
    for uvals in itertools.product(*(coll(f) for f, _ in unit_slots)):
        unit = {f: {} for f in m.m1.objects}
        for (f, c), v in zip(unit_slots, uvals):
            unit[f][c] = v
        for mvals in itertools.product(*(coll(f) for f, _ in mult_slots)):
            mult = {f: {} for f in m.m1.objects}
            for (f, c), v in zip(mult_slots, mvals):
                mult[f][c] = v
            mon = Monoid(coll, cp, j, mult, unit)
            if check_monoid(mon).ok:
                out.append(mon)
    return out


# -- operads as lax functors

def operad_as_lax(o: OperadData, bound: int | None = None) -> LaxFunctor:
    """The product-preserving lax functor on F_*(m)^op determined by o."""
    m, s = o.m, o.coll
    d = to_double(m, bound).op()
    seq = d.d1.meta["seq"]
    sets = {ob: list(itertools.product(*(s(g) for g in x))) for ob, x in seq.items()}
    maps = {}
    for mid, (x, y, phi) in d.d1.meta["mor"].items():
        from ..completion import seq_id
        maps[mid] = {ys: tuple(s.act(phi.components[i], ys[a]) for i, a in enumerate(phi.index_map))
                     for ys in sets[seq_id(y)]}
    functor = SetFunctor(d.d1, sets, maps, check=False)
    alpha = {}
    for pr in d.pairs.objects:
        fo, go = d.p1.ob[pr], d.p2.ob[pr]
        fs, hs = seq[fo], seq[go]
        table = {}
        for xs in sets[fo]:
            for ys in sets[go]:
                out, k = [], 0
                for f, a in zip(fs, xs):
                    n = m.arity(f)
                    out.append(o.compose(f, hs[k:k + n], a, ys[k:k + n]))
                    k += n
                table[xs, ys] = tuple(out)
        alpha[pr] = table
    eta = {ob: tuple(o.units[a] for a in x) for ob, x in d.d0.meta["seq"].items()}
    return LaxFunctor(d, functor, alpha, eta)


# -- free operads

@dataclass
class FreeOperadResult:
    generator: Collection
    stages: list[Collection]
    inclusions: list[dict[str, dict]]
    stabilized: bool
    stable_stage: int | None = None
    operad: OperadData | None = None
    composites: list[Composite] = field(default_factory=list)

    def sizes(self) -> list[dict[str, int]]:
        return [s.sizes() for s in self.stages]


def _stage_inclusion(m, prev_incl, comp_prev: Composite, comp_next: Composite) -> dict[str, dict]:
    """i_n : J + X o S_{n-1} -> J + X o S_n from i_{n-1}."""
    out = {}
    for f in m.m1.objects:
        mf = {}
        for (p, w, (a, bs)) in comp_prev.sets[f]:
            gs = m.composable.meta["ob"][p][1]
            mf[("X", (p, w, (a, bs)))] = ("X", comp_next.cls(p, w, (a, tuple(prev_incl[g][b] for g, b in zip(gs, bs)))))
        out[f] = mf
    return out


def free_operad(x: Collection, max_stage: int = 6, assume_supported: bool = False) -> FreeOperadResult:
    """Stages S_0 = J and S_{n+1} = J + X o S_n with their inclusions.

    The result is stable at stage n once i_{n-1} : S_{n-1} -> S_n is bijective
    and i_n is bijective as well; the operad is then read off S_n.
    """
    m = x.m
    j = unit_collection(m)
    stages: list[Collection] = [j]
    comps: list[Composite] = []
    incls: list[dict] = []
    stable = None
    n = 0
    while n < max_stage + 1:
        cp = compose_collections(x, stages[-1], assume_supported=assume_supported)
        comps.append(cp)
        nxt = sum_collections(j, cp, tags=("I", "X"))
        if n == 0:
            inc = {f: {e: ("I", e) for e in j.sets[f]} for f in m.m1.objects}
        else:
            inc = _stage_inclusion(m, incls[-1], comps[-2], cp)
            for f in m.m1.objects:
                inc[f].update({("I", e): ("I", e) for e in j.sets[f]})
        incls.append(inc)
        stages.append(nxt)
        n += 1
        bij = all(len(set(inc[f].values())) == len(inc[f]) == len(nxt(f)) for f in m.m1.objects)
        if bij:
            if stable is None:
                stable = n
            else:
                break
        else:
            stable = None
    res = FreeOperadResult(x, stages, incls, stable is not None, stable, None, comps)
    if stable is not None:
        res.operad = _free_operad_structure(res, stable)
    return res


def _free_operad_structure(res: FreeOperadResult, n: int) -> OperadData:
    """Grafting on the stable stage S_n."""
    s = res.stages[n]
    m = s.m
    j = res.stages[0]
    p = m.composable
    obdata = p.meta["ob"]
    if n == 0:
        # X o J is empty, so S = J
        return unit_operad_on(j)
    cp = res.composites[n - 1]          # X o S_{n-1}
    inc = res.inclusions[n - 1]         # S_{n-1} -> S_n
    inv = {f: {v: k for k, v in inc[f].items()} for f in m.m1.objects}
    memo: dict = {}

    def lift_tuple(w, gs):
        """An invertible morphism (w, (v_i)) out of the tuple (src w, gs), or None."""
        su = m.src_mor[w]
        gs2: list = [None] * len(m.src_ob[m.m1.tgt[w]])
        vs = []
        for g, c, k in zip(gs, su.components, su.index_map):
            cands = [v for v in m.m1.out(g) if m.t_mor(v) == c and m.m1.is_iso(v)]
            if not cands:
                return None
            vs.append(cands[0])
            gs2[k] = m.m1.tgt[cands[0]]
        pm = m.p_mor_id(w, tuple(vs), m.p_ob_id(m.m1.tgt[w], tuple(gs2)))
        if pm not in p.src:
            return None
        return pm, tuple(gs2), vs

    def graft(f, gs, a, bs):
        key = (f, gs, a, bs)
        if key not in memo:
            memo[key] = graft_unit(f, gs, a[1], bs) if a[0] == "I" else graft_tree(f, gs, a[1], bs)
        return memo[key]

    def graft_tree(f, gs, c, bs):
        for (q, w, y) in cp.members(f, c):
            if m.m1.is_identity(w):
                return graft_root(q, y, gs, bs)
        for (q, w, y) in cp.members(f, c):
            if not m.m1.is_iso(w):
                continue
            lifted = lift_tuple(w, gs)
            if lifted is None:
                continue
            pm, gs2, vs = lifted
            bs2: list = [None] * len(gs2)
            for b, v, k in zip(bs, vs, m.src_mor[w].index_map):
                bs2[k] = s.act(m.m1.inverse(v), b)
            return s.act(m.comp.mor[pm], graft_root(q, y, gs2, tuple(bs2)))
        raise CategoryError(f"no representative with an invertible comparison in class {c!r}")

    def graft_root(q, y, gs, bs):
        """Graft bs onto the leaves of the tree y sitting at q with identity comparison."""
        root, kids = y
        f2, hs = obdata[q]
        new_kids, new_hs, k = [], [], 0
        for h, kid in zip(hs, kids):
            r_ = m.arity(h)
            blk, vblk = gs[k:k + r_], bs[k:k + r_]
            k += r_
            val = graft(h, blk, inc[h][kid], vblk)
            hh = m.compose(h, blk)
            new_kids.append(inv[hh][val])
            new_hs.append(hh)
        return ("X", cp.inj(m.p_ob_id(f2, tuple(new_hs)), (root, tuple(new_kids))))

    def graft_unit(f, gs, jc, bs):
        (g,), (b,) = gs, bs
        for (xo, w, _) in j.kan.colims[f].classes[jc]:
            if not m.m1.is_iso(w):
                continue
            comp0 = m.src_mor[w].components[0]
            inv0 = m.m0.inverse(comp0)
            for v in m.m1.into(g):
                if m.t_mor(v) == inv0 and m.m1.is_iso(v):
                    g2 = m.m1.src[v]
                    vinv = m.m1.inverse(v)
                    q2 = m.p_ob_id(m.one(xo), (g2,))
                    pm = m.p_mor_id(w, (vinv,), q2)
                    if pm not in p.src:
                        continue
                    return s.act(m.comp.mor[pm], s.act(v, b))
        raise CategoryError(f"no invertible representative for the unit class {jc!r}")

    comp = {}
    for q, (f, gs) in obdata.items():
        for a in s(f):
            for bs in itertools.product(*(s(g) for g in gs)):
                comp[q, (a, bs)] = graft(f, gs, a, bs)
    units = {xo: ("I", j.cls(xo, m.m1.ident[m.one(xo)])) for xo in m.m0.objects}
    return OperadData(s, units, comp)


def generator_inclusion(res: FreeOperadResult) -> dict[str, dict]:
    """X -> S_n at the stable stage: x becomes the one-vertex tree with unit leaves."""
    m = res.generator.m
    n = res.stable_stage
    if n is None:
        raise CategoryError("the free operad has not stabilized")
    if n == 0:
        return {f: {} for f in m.m1.objects}
    cp = res.composites[n - 1]
    j = res.stages[0]
    out = {}
    for f in m.m1.objects:
        ones = tuple(m.one(xo) for xo in m.src_ob[f])
        q = m.p_ob_id(f, ones)
        leaves = []
        for xo in m.src_ob[f]:
            e = j.cls(xo, m.m1.ident[m.one(xo)])
            leaves.append(e if n == 1 else ("I", e))
        out[f] = {a: ("X", cp.inj(q, (a, tuple(leaves)))) for a in res.generator(f)}
    return out
