"""Base change of collections and operads along multifunctors.

phi* is precomposition with phi1; phi_! is the left Kan extension along phi1
(both on opposite categories).  Colour maps of presheaves induce
multifunctors between colour-changed multicategories.
"""
from __future__ import annotations

import itertools
from typing import Any, Mapping

from ..fincat import (CategoryError, FinCategory, Functor, KanExtension, SetFunctor, eid, grothendieck,
                      is_natural, left_kan_extension, pid)
from ..fmulti import FMulticategory, MultiFunctor, colour_change
from ..report import Report
from .collections import Collection, compose_collections, m1_op, unit_collection
from .structures import Monoid, OperadData, monoid_as_operad, operad_as_monoid


def _phi1_op(phi: MultiFunctor) -> Functor:
    return Functor(m1_op(phi.dom), m1_op(phi.cod), phi.phi1.ob, phi.phi1.mor, check=False)


def _check_cod(phi: MultiFunctor, s) -> None:
    m = s.m if isinstance(s, (Collection, OperadData)) else None
    if m is not phi.cod:
        raise CategoryError("the collection does not live over the codomain of the multifunctor")


def restrict(phi: MultiFunctor, s):
    """phi* on collections and on operads."""
    if isinstance(s, OperadData):
        _check_cod(phi, s)
        coll = restrict(phi, s.coll)
        dom, cod = phi.dom, phi.cod
        units = {x: s.units[phi.phi0.ob[x]] for x in dom.m0.objects}
        comp = {}
        for q, (f, gs) in dom.composable.meta["ob"].items():
            q2 = cod.p_ob_id(phi.phi1.ob[f], tuple(phi.phi1.ob[g] for g in gs))
            for a in coll(f):
                for bs in itertools.product(*(coll(g) for g in gs)):
                    comp[q, (a, bs)] = s.comp[q2, (a, bs)]
        return OperadData(coll, units, comp)
    _check_cod(phi, s)
    f = phi.phi1
    sets = {x: s.sets[f.ob[x]] for x in phi.dom.m1.objects}
    maps = {u: s.functor.maps[f.mor[u]] for u in phi.dom.m1.morphisms}
    return Collection(phi.dom, SetFunctor(m1_op(phi.dom), sets, maps, check=False))


class KanCollection(Collection):
    """phi_! S with elements (f, m, e), m : g -> phi1(f) in the target multimorphisms."""

    def __init__(self, phi: MultiFunctor, s: Collection, kan: KanExtension):
        super().__init__(phi.cod, kan.functor)
        self.phi, self.source, self.kan = phi, s, kan

    def cls(self, f: str, mm: str, e: Any) -> tuple:
        return self.kan.colims[self.m.m1.src[mm]].cls((f, mm, e))

    def unit_map(self, f: str, e: Any) -> tuple:
        return self.kan.unit[f][e]


def left_kan_collection(phi: MultiFunctor, s: Collection) -> KanCollection:
    if s.m is not phi.dom:
        raise CategoryError("the collection does not live over the domain of the multifunctor")
    return KanCollection(phi, s, left_kan_extension(s.functor, _phi1_op(phi)))


def _image_tuple(phi: MultiFunctor, q: str) -> str:
    f, gs = phi.dom.composable.meta["ob"][q]
    return phi.cod.p_ob_id(phi.phi1.ob[f], tuple(phi.phi1.ob[g] for g in gs))


def lax_comparison(phi: MultiFunctor, s: Collection, t: Collection) -> tuple[dict, Report]:
    """(phi* S) o (phi* T) -> phi*(S o T), class (p, w, x) |-> class (phi p, phi1 w, x)."""
    dom = phi.dom
    st = compose_collections(s, t, assume_supported=True)
    lhs = compose_collections(restrict(phi, s), restrict(phi, t), assume_supported=True)
    rhs = restrict(phi, st)
    rep = Report(f"lax comparison along {dom.name} -> {phi.cod.name}", arity_bound=dom.bound)
    out, w = {}, None
    for f in dom.m1.objects:
        mf = {}
        for c in lhs.sets[f]:
            vals = {st.cls(_image_tuple(phi, q), phi.phi1.mor[wm], x) for (q, wm, x) in lhs.members(f, c)}
            if len(vals) != 1 and w is None:
                w = ("not well defined", f, c)
            mf[c] = min(vals, key=repr)
        out[f] = mf
    rep.add("well defined", w)
    rep.add("natural", None if is_natural(lhs.functor, rhs.functor, out) else "naturality square fails")
    return out, rep


def lax_unit(phi: MultiFunctor) -> dict[str, dict]:
    """J_M -> phi* J_N."""
    jm, jn = unit_collection(phi.dom), unit_collection(phi.cod)
    out = {}
    for f in phi.dom.m1.objects:
        out[f] = {(x, w, e): jn.cls(phi.phi0.ob[x], phi.phi1.mor[w]) for (x, w, e) in jm.sets[f]}
    return out


def strong_comparison(phi: MultiFunctor, s: Collection, t: Collection) -> tuple[dict, Report]:
    """phi_!(S o T) -> phi_!S o phi_!T with its well-definedness and bijectivity checks."""
    cod = phi.cod
    st = compose_collections(s, t, assume_supported=True)
    lan_st = left_kan_collection(phi, st)
    ls, lt = left_kan_collection(phi, s), left_kan_collection(phi, t)
    rhs = compose_collections(ls, lt, assume_supported=True)
    obdata = phi.dom.composable.meta["ob"]
    rep = Report(f"strong monoidality along {phi.dom.name} -> {cod.name}", arity_bound=cod.bound)

    def image(f, mm, c):
        q, w, (a, bs) = c
        f0, gs = obdata[q]
        q2 = _image_tuple(phi, q)
        if q2 not in cod.composable.ident:
            raise CategoryError(f"image tuple {q2} leaves the composability category")
        return rhs.cls(q2, cod.m1.table[phi.phi1.mor[w], mm],
                       (ls.unit_map(f0, a), tuple(lt.unit_map(g, b) for g, b in zip(gs, bs))))

    out, w = {}, None
    for g in cod.m1.objects:
        mg = {}
        for e in lan_st.sets[g]:
            vals = set()
            for (f, mm, c) in lan_st.kan.colims[g].classes[e]:
                for c2 in st.members(f, c):
                    vals.add(image(f, mm, c2))
            if len(vals) != 1 and w is None:
                w = ("not well defined", g, e)
            mg[e] = min(vals, key=repr)
        out[g] = mg
    rep.add("well defined", w)
    w = None
    for g in cod.m1.objects:
        if len(set(out[g].values())) != len(out[g]) or len(out[g]) != len(rhs.sets[g]):
            w = ("not bijective", g, len(out[g]), len(rhs.sets[g]))
            break
    rep.add("bijective", w)
    return out, rep


def left_kan_operad(phi: MultiFunctor, o: OperadData) -> OperadData:
    """phi_! O for phi0 invertible, through the inverse of the strong comparison."""
    dom, cod = phi.dom, phi.cod
    inv0 = {y: x for x, y in phi.phi0.ob.items()}
    if len(inv0) != len(dom.m0.objects) or set(inv0) != set(cod.m0.objects):
        raise CategoryError("phi_! on operads needs phi0 bijective on objects")
    mon = operad_as_monoid(o)
    comp_map, rep = strong_comparison(phi, o.coll, o.coll)
    if not rep.ok:
        raise CategoryError(f"comparison is not invertible: {rep.failures()[0].witness}")
    lo = left_kan_collection(phi, o.coll)
    cp = compose_collections(lo, lo, assume_supported=True)
    mult = {}
    for g in cod.m1.objects:
        back = {v: k for k, v in comp_map[g].items()}
        mg = {}
        for e in cp.sets[g]:
            (f, mm, c) = back[e]
            mg[e] = lo.cls(f, mm, mon.mult[f][c])
        mult[g] = mg
    jn = unit_collection(cod)
    unit = {}
    for g in cod.m1.objects:
        ug = {}
        for (y, mm, _) in jn.sets[g]:
            x = inv0[y]
            ug[(y, mm, "*")] = lo.cls(dom.one(x), mm, o.units[x])
        unit[g] = ug
    return monoid_as_operad(Monoid(lo, cp, jn, mult, unit))


# -- colour change by presheaves

class ColourChange:
    """M^A with the category of elements of A and its projection."""

    def __init__(self, m: FMulticategory, colours: SetFunctor):
        self.m, self.colours = m, colours
        self.el, self.proj = grothendieck(colours)
        self.ma = colour_change(m, self.proj)
        self.ma.name = f"{m.name}^A"

    def colour_id(self, x: str, a: Any) -> str:
        return pid(x, eid(a))

    def point(self, c: str) -> tuple:
        return self.el.meta["point"][c]

    def multimorphism(self, g: str, out: Any, ins) -> str:
        """Id of the multimorphism g with output colour out and input colours ins."""
        x = self.m.t(g)
        return pid(g, self.colour_id(x, out), pid(*(self.colour_id(y, a) for y, a in zip(self.m.src_ob[g], ins))))


def presheaf(m: FMulticategory, values: Mapping[str, Any], action: Mapping[str, Mapping] | None = None) -> SetFunctor:
    """A presheaf on m0; a missing action of v is the identity."""
    from .collections import m0_op
    c = m0_op(m)
    action = action or {}
    sets = {x: tuple(values.get(x, ())) for x in c.objects}
    maps = {}
    for v in c.morphisms:
        if v in action:
            maps[v] = dict(action[v])
        elif set(sets[c.src[v]]) == set(sets[c.tgt[v]]):
            maps[v] = {e: e for e in sets[c.src[v]]}
        else:
            raise CategoryError(f"no action given for {v}")
    return SetFunctor(c, sets, maps)


def colour_functor(ca: ColourChange, cb: ColourChange, f: Mapping[str, Mapping], over: Functor | None = None) -> Functor:
    """el(A) -> el(B) induced by a natural map f : A -> B lying over `over` (default identity)."""
    ob, mor = {}, {}
    pa = ca.el.meta["point"]
    for o, (x, a) in pa.items():
        y = x if over is None else over.ob[x]
        ob[o] = cb.colour_id(y, f[x][a])
    for mid in ca.el.morphisms:
        v = ca.proj.mor[mid]
        tgt = pa[ca.el.tgt[mid]]
        v2 = v if over is None else over.mor[v]
        mor[mid] = pid(v2, eid(f[tgt[0]][tgt[1]]))
    return Functor(ca.el, cb.el, ob, mor)


def colour_multifunctor(phi: MultiFunctor, ca: ColourChange, cb: ColourChange, g: Functor) -> MultiFunctor:
    """phi^g : M^A -> N^B for g : el(A) -> el(B) lying over phi0."""
    ma, mb = ca.ma, cb.ma
    ob1, mor1 = {}, {}
    for o, (h, a, ins) in ma.m1.meta["ob"].items():
        ob1[o] = pid(phi.phi1.ob[h], g.ob[a], pid(*(g.ob[i] for i in ins)))
    for k, (u, v, ws, o, o2) in ma.m1.meta["mor"].items():
        mor1[k] = pid(phi.phi1.mor[u], g.mor[v], pid(*(g.mor[w] for w in ws)), ob1[o2])
    return MultiFunctor(ma, mb, g, Functor(ma.m1, mb.m1, ob1, mor1, check=False))


def identity_over(m: FMulticategory) -> MultiFunctor:
    from ..fmulti import identity_multifunctor
    return identity_multifunctor(m)


def colour_map_multifunctor(ca: ColourChange, cb: ColourChange, f: Mapping[str, Mapping]) -> MultiFunctor:
    """M^A -> M^B for a natural map f : A -> B of presheaves on m0."""
    if ca.m is not cb.m:
        raise CategoryError("colour maps need a common multicategory")
    return colour_multifunctor(identity_over(ca.m), ca, cb, colour_functor(ca, cb, f))


def is_injective_colour_map(f: Mapping[str, Mapping]) -> bool:
    return all(len(set(c.values())) == len(c) for c in f.values())


def coreflexivity_report(i: MultiFunctor, s: Collection) -> Report:
    """i* i_! S ~= S via the unit of the Kan extension, for a colour inclusion i."""
    lan = left_kan_collection(i, s)
    rep = Report("coreflexivity of the colour inclusion", arity_bound=s.m.bound)
    w = None
    for f in s.m.m1.objects:
        img = [lan.unit_map(f, e) for e in s(f)]
        if len(set(img)) != len(img) or len(img) != len(lan.sets[i.phi1.ob[f]]):
            w = ("unit not bijective", f, len(img), len(lan.sets[i.phi1.ob[f]]))
            break
    rep.add("unit of i_! is invertible", w)
    return rep


# -- the mate square

def pull_presheaf(phi0: Functor, a: SetFunctor, dom_op: FinCategory) -> SetFunctor:
    """A o phi0 as a presheaf on dom(phi0)."""
    return SetFunctor(dom_op, {x: a.sets[phi0.ob[x]] for x in dom_op.objects},
                      {v: a.maps[phi0.mor[v]] for v in dom_op.morphisms}, check=False)


class MateSquare:
    def __init__(self, phi: MultiFunctor, a: SetFunctor, b: SetFunctor, i: Mapping[str, Mapping]):
        from .collections import m0_op
        m, n = phi.dom, phi.cod
        self.phi, self.i = phi, i
        self.na, self.nb = ColourChange(n, a), ColourChange(n, b)
        pa = pull_presheaf(phi.phi0, a, m0_op(m))
        pb = pull_presheaf(phi.phi0, b, m0_op(m))
        self.ma, self.mb = ColourChange(m, pa), ColourChange(m, pb)
        i_m = {x: i[phi.phi0.ob[x]] for x in m.m0.objects}
        self.i_n = colour_map_multifunctor(self.na, self.nb, i)
        self.i_m = colour_map_multifunctor(self.ma, self.mb, i_m)
        ident = {x: {e: e for e in a.sets[phi.phi0.ob[x]]} for x in m.m0.objects}
        identb = {x: {e: e for e in b.sets[phi.phi0.ob[x]]} for x in m.m0.objects}
        self.phi_a = colour_multifunctor(phi, self.ma, self.na,
                                         colour_functor(self.ma, self.na, ident, over=phi.phi0))
        self.phi_b = colour_multifunctor(phi, self.mb, self.nb,
                                         colour_functor(self.mb, self.nb, identb, over=phi.phi0))

    def mate(self, o: Collection) -> tuple[dict, Report]:
        """(phi^A)*-then-i_! versus i_!-then-(phi^B)* on a collection over N^A."""
        left = left_kan_collection(self.i_m, restrict(self.phi_a, o))
        inner = left_kan_collection(self.i_n, o)
        right = restrict(self.phi_b, inner)
        rep = Report("mate of the colour square", arity_bound=o.m.bound)
        out, w = {}, None
        for bq in self.mb.ma.m1.objects:
            mb = {}
            for e in left.sets[bq]:
                vals = {inner.cls(self.phi_a.phi1.ob[a], self.phi_b.phi1.mor[mm], x)
                        for (a, mm, x) in left.kan.colims[bq].classes[e]}
                if len(vals) != 1 and w is None:
                    w = ("not well defined", bq, e)
                mb[e] = min(vals, key=repr)
            out[bq] = mb
        rep.add("well defined", w)
        w = None
        for bq in self.mb.ma.m1.objects:
            if len(set(out[bq].values())) != len(out[bq]) or len(out[bq]) != len(right.sets[bq]):
                w = ("not bijective", bq)
                break
        rep.add("bijective", w)
        if w is None:
            rep.add("natural", None if is_natural(left.functor, right.functor, out) else "naturality fails")
        return out, rep


def mate_check(phi: MultiFunctor, a: SetFunctor, b: SetFunctor, i: Mapping[str, Mapping],
               samples=None) -> Report:
    """Hypotheses (phi0 invertible, i injective) and the mate on sample collections.

    samples maps the multicategory N^A to a list of collections over it; the
    default is the terminal collection.
    """
    rep = Report(f"mate along {phi.dom.name} -> {phi.cod.name}", arity_bound=phi.dom.bound)
    inv = len(set(phi.phi0.ob.values())) == len(phi.dom.m0.objects) == len(phi.cod.m0.objects)
    rep.add("phi0 invertible", None if inv else "phi0 is not bijective on objects")
    rep.add("colour map injective", None if is_injective_colour_map(i) else "i is not injective")
    if not rep.ok:
        return rep
    sq = MateSquare(phi, a, b, i)
    if samples is None:
        from .collections import terminal_collection
        samples = lambda ma: [terminal_collection(ma)]
    for k, o in enumerate(samples(sq.na.ma)):
        _, r = sq.mate(o)
        for res in r.results:
            rep.add(f"sample {k}: {res.name}", res.witness)
    return rep
