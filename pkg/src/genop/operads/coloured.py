"""Coloured operads: an operad over M^A for a presheaf of colours A on m0."""
from __future__ import annotations

import itertools
from typing import Any, Mapping

from ..fincat import (CapExceeded, CategoryError, FinCategory, SetFunctor, eid, ekey,
                      natural_transformations, pid)
from ..fmulti import FMulticategory, MultiFunctor
from ..report import Report
from .basechange import ColourChange, colour_map_multifunctor, presheaf
from .collections import collection
from .structures import OperadData, check_operad, operad_from_function, terminal_operad, unit_operad


class ColouredOperad:
    def __init__(self, cc: ColourChange, operad: OperadData, name: str = ""):
        if operad.m is not cc.ma:
            raise CategoryError("the operad must live over the colour-changed multicategory")
        self.cc, self.operad, self.name = cc, operad, name
        self.m = cc.m
        self.colours = cc.colours

    @property
    def ma(self) -> FMulticategory:
        return self.cc.ma

    def sort(self, g: str, out: Any, ins) -> str:
        return self.cc.multimorphism(g, out, ins)

    def ops(self, g: str, out: Any, ins) -> tuple:
        return self.operad.coll(self.sort(g, out, ins))

    def unit(self, x: str, a: Any) -> Any:
        return self.operad.units[self.cc.colour_id(x, a)]

    def sort_data(self, s: str) -> tuple:
        """(g, (X, out colour), ((X_i, in colour) ...)) for a sort id."""
        g, out, ins = self.ma.m1.meta["ob"][s]
        pt = self.cc.el.meta["point"]
        return g, pt[out], tuple(pt[i] for i in ins)

    def check(self) -> Report:
        rep = check_operad(self.operad)
        rep.subject = f"coloured operad {self.name}".strip()
        return rep

    def __repr__(self) -> str:
        return f"ColouredOperad({self.name or self.m.name}: {dict(self.colours.sizes())})"


def coloured_terminal(m: FMulticategory, colours: SetFunctor, name: str = "terminal") -> ColouredOperad:
    cc = ColourChange(m, colours)
    return ColouredOperad(cc, terminal_operad(cc.ma), name)


def coloured_unit(m: FMulticategory, colours: SetFunctor, name: str = "unit") -> ColouredOperad:
    cc = ColourChange(m, colours)
    return ColouredOperad(cc, unit_operad(cc.ma), name)


def coloured_unary(m: FMulticategory, colours: SetFunctor, name: str = "chaotic") -> ColouredOperad:
    """One operation between any two colours over the same object, at the unit
    multimorphisms only; nothing else."""
    cc = ColourChange(m, colours)
    ones = {m.one(x) for x in m.m0.objects}
    values = {s: ("*",) for s, (g, a, ins) in cc.ma.m1.meta["ob"].items() if g in ones}
    coll = collection(cc.ma, values, _constant_action(cc.ma, values))
    units = {c: "*" for c in cc.ma.m0.objects}
    return ColouredOperad(cc, operad_from_function(coll, units, lambda *a: "*"), name)


def _constant_action(ma: FMulticategory, values: Mapping[str, Any]) -> dict:
    act = {}
    for u in ma.m1.morphisms:
        tgt = ma.m1.tgt[u]
        if values.get(tgt):
            act[u] = {"*": "*"}
        else:
            act[u] = {}
    return act


def coloured_from_function(m: FMulticategory, colours: SetFunctor, values: Mapping[str, Any],
                           units: Mapping[str, Any], fn, action: Mapping | None = None,
                           name: str = "") -> ColouredOperad:
    """values and units are keyed by sort ids and colour ids of M^A; fn(f, gs, o, os)
    gives the composite."""
    cc = ColourChange(m, colours)
    coll = collection(cc.ma, values, action)
    return ColouredOperad(cc, operad_from_function(coll, units, fn), name)


# -- morphisms

class ColouredMorphism:
    """(f, phi) : (A, O) -> (B, P) with f : A -> B and phi : O -> f*P."""

    def __init__(self, src: ColouredOperad, tgt: ColouredOperad, f: Mapping[str, Mapping],
                 phi: Mapping[str, Mapping]):
        if src.m is not tgt.m:
            raise CategoryError("coloured operads over different multicategories")
        self.src, self.tgt = src, tgt
        self.f = {x: dict(v) for x, v in f.items()}
        self.phi = {s: dict(v) for s, v in phi.items()}
        self._mf: MultiFunctor | None = None

    @property
    def multifunctor(self) -> MultiFunctor:
        if self._mf is None:
            self._mf = colour_map_multifunctor(self.src.cc, self.tgt.cc, self.f)
        return self._mf

    def image_sort(self, s: str) -> str:
        return self.multifunctor.phi1.ob[s]

    def check(self) -> Report:
        src, tgt = self.src, self.tgt
        o, p = src.operad, tgt.operad
        rep = Report("coloured operad morphism", arity_bound=src.m.bound)
        a, b = src.colours, tgt.colours
        w = None
        for v in a.dom.morphisms:
            x, y = a.dom.src[v], a.dom.tgt[v]
            for e in a.sets[x]:
                if self.f[y][a.maps[v][e]] != b.maps[v][self.f[x][e]]:
                    w = ("colour map not natural", v, e)
                    break
            if w:
                break
        rep.add("colour map natural", w)
        if w is not None:
            return rep
        mf = self.multifunctor
        w = None
        for s in src.ma.m1.objects:
            img = set(p.coll(mf.phi1.ob[s]))
            if any(self.phi.get(s, {}).get(e) not in img for e in o.coll(s)):
                w = ("operation map undefined or outside the target", s)
                break
        rep.add("well-formed", w)
        if w is not None:
            return rep
        w = None
        for u in src.ma.m1.morphisms:
            s, s2 = src.ma.m1.src[u], src.ma.m1.tgt[u]
            for e in o.coll(s2):
                if self.phi[s][o.coll.act(u, e)] != p.coll.act(mf.phi1.mor[u], self.phi[s2][e]):
                    w = ("operation map not natural", u, e)
                    break
            if w:
                break
        rep.add("natural", w)
        w = None
        for c in src.ma.m0.objects:
            if self.phi[src.ma.one(c)][o.units[c]] != p.units[mf.phi0.ob[c]]:
                w = ("unit", c)
                break
        rep.add("units", w)
        w = None
        obdata = src.ma.composable.meta["ob"]
        for q, (g, gs) in obdata.items():
            q2 = tgt.ma.p_ob_id(mf.phi1.ob[g], tuple(mf.phi1.ob[h] for h in gs))
            for e in o.coll(g):
                for es in itertools.product(*(o.coll(h) for h in gs)):
                    lhs = self.phi[src.ma.comp.ob[q]][o.comp[q, (e, es)]]
                    rhs = p.comp[q2, (self.phi[g][e], tuple(self.phi[h][x] for h, x in zip(gs, es)))]
                    if lhs != rhs:
                        w = ("composition", q, e, es)
                        break
                if w:
                    break
            if w:
                break
        rep.add("composition", w)
        return rep

    def then(self, other: "ColouredMorphism") -> "ColouredMorphism":
        f = {x: {a: other.f[x][b] for a, b in fx.items()} for x, fx in self.f.items()}
        phi = {s: {e: other.phi[self.image_sort(s)][v] for e, v in ps.items()} for s, ps in self.phi.items()}
        return ColouredMorphism(self.src, other.tgt, f, phi)

    def key(self) -> tuple:
        return (tuple((x, tuple(sorted(v.items(), key=ekey))) for x, v in sorted(self.f.items())),
                tuple((s, tuple(sorted(v.items(), key=ekey))) for s, v in sorted(self.phi.items()) if v))


def identity_morphism(co: ColouredOperad) -> ColouredMorphism:
    f = {x: {a: a for a in co.colours.sets[x]} for x in co.m.m0.objects}
    phi = {s: {e: e for e in co.operad.coll(s)} for s in co.ma.m1.objects}
    return ColouredMorphism(co, co, f, phi)


def coloured_morphisms(src: ColouredOperad, tgt: ColouredOperad, cap: int = 1 << 18) -> list[ColouredMorphism]:
    """Every morphism (A, O) -> (B, P): over each colour map, a backtracking search
    over operation maps checking each naturality, unit and composition constraint as
    soon as its operations are assigned.  cap bounds the search nodes."""
    out = []
    budget = [cap]
    o, p = src.operad, tgt.operad
    for f in natural_transformations(src.colours, tgt.colours):
        mf = colour_map_multifunctor(src.cc, tgt.cc, f)
        img = {s: mf.phi1.ob[s] for s in src.ma.m1.objects}
        variables = sorted(((s, e) for s in src.ma.m1.objects for e in o.coll(s)),
                           key=lambda v: (src.ma.arity(v[0]), v[0], ekey(v[1])))
        index = {v: i for i, v in enumerate(variables)}
        domains = [list(p.coll(img[s])) for s, _ in variables]
        buckets: dict[int, list] = {}

        def add(vs, fn):
            buckets.setdefault(max(index[v] for v in vs), []).append((vs, fn))

        for c in src.ma.m0.objects:
            v = (src.ma.one(c), o.units[c])
            want = p.units[mf.phi0.ob[c]]
            add([v], lambda a, v=v, want=want: a[v] == want)
        for u in src.ma.m1.morphisms:
            s, s2 = src.ma.m1.src[u], src.ma.m1.tgt[u]
            u2 = mf.phi1.mor[u]
            for e in o.coll(s2):
                v1, v2 = (s, o.coll.act(u, e)), (s2, e)
                add([v1, v2], lambda a, v1=v1, v2=v2, u2=u2: a[v1] == p.coll.act(u2, a[v2]))
        for q, (g, gs) in src.ma.composable.meta["ob"].items():
            q2 = tgt.ma.p_ob_id(img[g], tuple(img[h] for h in gs))
            r = src.ma.comp.ob[q]
            for e in o.coll(g):
                for es in itertools.product(*(o.coll(h) for h in gs)):
                    vs = [(g, e)] + [(h, x) for h, x in zip(gs, es)]
                    vr = (r, o.comp[q, (e, es)])
                    add(vs + [vr], lambda a, vs=vs, vr=vr, q2=q2:
                        a[vr] == p.comp[q2, (a[vs[0]], tuple(a[v] for v in vs[1:]))])
        assign: dict = {}

        def search(i):
            if i == len(variables):
                phi: dict[str, dict] = {s: {} for s in src.ma.m1.objects}
                for (s, e), val in assign.items():
                    phi[s][e] = val
                mor = ColouredMorphism(src, tgt, f, phi)
                mor._mf = mf
                out.append(mor)
                return
            for val in domains[i]:
                budget[0] -= 1
                if budget[0] < 0:
                    raise CapExceeded(f"morphism search exceeds the cap {cap}")
                assign[variables[i]] = val
                if all(fn(assign) for _, fn in buckets.get(i, ())):
                    search(i + 1)
                del assign[variables[i]]

        search(0)
    return out


# -- underlying categories

def underlying_category(co: ColouredOperad) -> dict[str, FinCategory]:
    """Per object X of m0: objects A(X), hom(a, b) = O(1_X; a; b)."""
    m, ma, o = co.m, co.ma, co.operad
    out = {}
    for x in m.m0.objects:
        one = m.one(x)
        cols = list(co.colours.sets[x])
        names = {a: eid(a) for a in cols}
        ms, data = {}, {}
        for a in cols:
            for b in cols:
                s = co.sort(one, b, (a,))
                for e in o.coll(s):
                    mid = pid(names[a], names[b], eid(e))
                    ms[mid] = (names[a], names[b])
                    data[mid] = (s, e, a, b)
        table = {}
        for m1_, (s1, e1, a, b) in data.items():
            for m2_, (s2, e2, b2, c) in data.items():
                if b2 != b:
                    continue
                r = o.comp[ma.p_ob_id(s2, (s1,)), (e2, (e1,))]
                table[m2_, m1_] = pid(names[a], names[c], eid(r))
        ident = {names[a]: pid(names[a], names[a], eid(co.unit(x, a))) for a in cols}
        cat = FinCategory([names[a] for a in cols], ms, ident, table, name=f"und({x})", check=False)
        cat.meta["op"] = data
        out[x] = cat
    return out


# -- weak-equivalence classes at the level of sets

def _operation_maps(mor: ColouredMorphism):
    for s in mor.src.ma.m1.objects:
        yield s, mor.src.operad.coll(s), mor.tgt.operad.coll(mor.image_sort(s)), mor.phi.get(s, {})


def is_fully_faithful(mor: ColouredMorphism) -> bool:
    """phi bijective on every operation set."""
    for s, dom, cod, ph in _operation_maps(mor):
        img = [ph[e] for e in dom]
        if len(set(img)) != len(img) or len(img) != len(cod):
            return False
    return True


def is_local_fibration_setlevel(mor: ColouredMorphism) -> bool:
    """phi surjective on every operation set."""
    for s, dom, cod, ph in _operation_maps(mor):
        if set(ph[e] for e in dom) != set(cod):
            return False
    return True


def _iso_classes(cat: FinCategory) -> dict[str, int]:
    rep, k = {}, 0
    for x in cat.objects:
        if x in rep:
            continue
        rep[x] = k
        for mm in cat.out(x):
            if cat.is_iso(mm):
                rep[cat.tgt[mm]] = k
        k += 1
    return rep


def is_essentially_surjective(mor: ColouredMorphism) -> bool:
    """Per object X, every colour of the target is isomorphic to an image colour."""
    und = underlying_category(mor.tgt)
    for x, cat in und.items():
        cls = _iso_classes(cat)
        hit = {cls[eid(mor.f[x][a])] for a in mor.src.colours.sets[x]}
        if any(cls[eid(b)] not in hit for b in mor.tgt.colours.sets[x]):
            return False
    return True


def is_equivalence(mor: ColouredMorphism) -> bool:
    return is_fully_faithful(mor) and is_essentially_surjective(mor)


def finite_colour_reduction(mor: ColouredMorphism, kind: str = "bijective",
                            max_len: int | None = None, cap: int = 1 << 16) -> bool:
    """The predicate (bijective or surjective on operations) tested through every
    g : C -> A with C a sequence of objects of m0 of length <= max_len (default
    bound + 1, one for the output and one per input).

    A map g : C -> A is a choice of colours c_i in A(C_i); g*O is the operad of
    operations whose colours are pulled back from the c_i along morphisms into C_i.
    """
    if kind not in ("bijective", "surjective"):
        raise ValueError("kind is 'bijective' or 'surjective'")
    m, a = mor.src.m, mor.src.colours
    n = m.bound + 1 if max_len is None else max_len
    pts = [(x, e) for x in m.m0.objects for e in a.sets[x]]
    count = 0
    for k in range(n + 1):
        for seq in itertools.product(pts, repeat=k):
            count += 1
            if count > cap:
                raise CapExceeded(f"more than {cap} colour sequences")
            if not _reduced_ok(mor, seq, kind):
                return False
    return True


def _reduced_ok(mor: ColouredMorphism, seq, kind: str) -> bool:
    """Check phi on the sorts of M^C for C = (C_i) with chosen colours."""
    m, a = mor.src.m, mor.src.colours

    def pulled(x):
        """Colours of the representable sum at x, pushed into A."""
        out = set()
        for (ci, e) in seq:
            for v in m.m0.hom(x, ci):
                out.add(a.maps[v][e])
        return out

    for g in m.m1.objects:
        outs = pulled(m.t(g))
        ins = [pulled(x) for x in m.src_ob[g]]
        for b0 in outs:
            for bs in itertools.product(*ins):
                s = mor.src.sort(g, b0, bs)
                dom = mor.src.operad.coll(s)
                cod = mor.tgt.operad.coll(mor.image_sort(s))
                img = [mor.phi[s][e] for e in dom]
                if kind == "bijective" and (len(set(img)) != len(img) or len(img) != len(cod)):
                    return False
                if kind == "surjective" and set(img) != set(cod):
                    return False
    return True


# -- attaching new colours along a fully faithful u : K -> H

def _unary_mor(cc: ColourChange, v: str, out_y: Any, in_y: Any) -> str:
    """The morphism of M^A over 1_v from the unit sort at (X, A(v) out_y) with input
    A(v) in_y to the unit sort at (Y, out_y) with input in_y."""
    m = cc.m
    y = m.m0.tgt[v]
    o2 = cc.multimorphism(m.one(y), out_y, (in_y,))
    return pid(m.one_mor(v), pid(v, eid(out_y)), pid(pid(v, eid(in_y))), o2)


def _restrict_colour(a: SetFunctor, v: str, e: Any) -> Any:
    return a.maps[v][e]


class Attachment:
    """Attachment data for a coloured operad (A, O).

    new : a presheaf F of new colours on m0.
    u : a fully faithful functor K -> H, K with one object, H with two objects.
    base[(X, x)] : a colour of A(X) for x in F(X), natural in X.
    w[(X, x)][k] : the unary operation of O(1_X; base; base) hit by k in K.  Together
    with base this is a functor K -> underlying category at X, natural in X.
    """

    def __init__(self, co: ColouredOperad, new: SetFunctor, u, base: Mapping, w: Mapping):
        self.co, self.new, self.u = co, new, u
        self.k, self.h = u.dom, u.cod
        if len(self.k.objects) != 1 or len(self.h.objects) != 2:
            raise CategoryError("u must go from a one-object category to a two-object category")
        self.h0 = u.ob[self.k.objects[0]]
        self.h1 = next(x for x in self.h.objects if x != self.h0)
        self.uinv = {u.mor[k]: k for k in self.k.morphisms}
        if set(self.uinv) != set(self.h.hom(self.h0, self.h0)) or len(self.uinv) != len(self.k.morphisms):
            raise CategoryError("u is not fully faithful")
        self.base = dict(base)
        self.w = {key: dict(v) for key, v in w.items()}

    def points(self):
        for x in self.co.m.m0.objects:
            for e in self.new.sets[x]:
                yield x, e

    def check(self) -> Report:
        co, m, a, f = self.co, self.co.m, self.co.colours, self.new
        rep = Report("attachment", arity_bound=m.bound)
        w = None
        for u in m.m1.morphisms:
            if m.m1.tgt[u] in {m.one(x) for x in m.m0.objects} and m.m1.src[u] not in {m.one(x) for x in m.m0.objects}:
                w = ("a non-unit multimorphism maps to a unit", u)
                break
        rep.add("unit collection discrete", w)
        w = None
        for v in m.m0.morphisms:
            x, y = m.m0.src[v], m.m0.tgt[v]
            for e in f.sets[y]:
                if a.maps[v][self.base[y, e]] != self.base[x, f.maps[v][e]]:
                    w = ("base colours not natural", v, e)
                    break
        rep.add("base natural", w)
        w = None
        o, kc = co.operad, self.k
        for (x, e) in self.points():
            c0 = self.base[x, e]
            s = co.sort(m.one(x), c0, (c0,))
            ws = self.w[x, e]
            if ws.get(kc.ident[kc.objects[0]]) != co.unit(x, c0):
                w = ("identity not sent to the unit", x, e)
                break
            for k2 in kc.morphisms:
                for k1 in kc.morphisms:
                    if ws.get(k1) not in o.coll(s) or ws.get(k2) not in o.coll(s):
                        w = ("operation outside O(1; base; base)", x, e)
                        break
                    got = o.comp[co.ma.p_ob_id(s, (s,)), (ws[k2], (ws[k1],))]
                    if got != ws[kc.table[k2, k1]]:
                        w = ("w is not a functor", x, e, k2, k1)
                        break
                if w:
                    break
            if w:
                break
        rep.add("w functorial", w)
        w = None
        for v in m.m0.morphisms:
            x, y = m.m0.src[v], m.m0.tgt[v]
            for e in f.sets[y]:
                c0 = self.base[y, e]
                mor = _unary_mor(co.cc, v, c0, c0)
                for k in kc.morphisms:
                    if o.coll.act(mor, self.w[y, e][k]) != self.w[x, f.maps[v][e]][k]:
                        w = ("w not natural", v, e, k)
                        break
        rep.add("w natural", w)
        return rep


class PushoutResult:
    """The coloured operad (B, P) with the map (A, O) -> (B, P) and the functor psi
    from F x H, plus the classes of the presentation."""

    def __init__(self, att, operad, inclusion, psi, classes, newname):
        self.attachment, self.operad, self.inclusion, self.psi = att, operad, inclusion, psi
        self.classes, self.newname = classes, newname

    def sizes(self) -> dict:
        return {x: len(self.operad.colours.sets[x]) for x in self.operad.m.m0.objects}


def explicit_pushout(att: Attachment, check: bool = True) -> PushoutResult:
    """The pushout of (A, O) <- F x K -> F x H, presented by generators and relations.

    An operation whose output colour is old is (None, f, (g_i)) with f in O at the old
    colours obtained by replacing each new input x by base(x), and g_i in H(1, 0) one per
    new input.  A new output colour adds g0 in H(0, 1) in front.  Unary operations
    from a new colour to itself get an extra summand H(1, 1).
    """
    from networkx.utils import UnionFind
    if check:
        rep = att.check()
        if not rep.ok:
            raise CategoryError(f"bad attachment: {rep.failures()[0]}")
    co, m, a, fset, hc = att.co, att.co.m, att.co.colours, att.new, att.h
    h0, h1 = att.h0, att.h1
    newname, old_of, bvals = {}, {}, {}
    for x in m.m0.objects:
        nm = {e: f"new:{eid(e)}" for e in fset.sets[x]}
        if set(nm.values()) & set(a.sets[x]):
            raise CategoryError(f"new colour names clash with old colours at {x}")
        newname[x] = nm
        old_of[x] = {v: e for e, v in nm.items()}
        bvals[x] = list(a.sets[x]) + list(nm.values())
    action = {}
    for v in a.dom.morphisms:
        sx, tx = a.dom.src[v], a.dom.tgt[v]
        mp = dict(a.maps[v])
        mp.update({newname[sx][e]: newname[tx][fset.maps[v][e]] for e in fset.sets[sx]})
        action[v] = mp
    bcol = presheaf(m, bvals, action)
    cb = ColourChange(m, bcol)
    pt = cb.el.meta["point"]
    o = co.operad

    def is_new(x, b):
        return b in old_of[x]

    def lower(x, b):
        return att.base[x, old_of[x][b]] if is_new(x, b) else b

    sdata, lower_sort = {}, {}
    for s, (g, out, ins) in cb.ma.m1.meta["ob"].items():
        d = (g, pt[out], tuple(pt[i] for i in ins))
        sdata[s] = d
        lower_sort[s] = co.sort(g, lower(*d[1]), [lower(*c) for c in d[2]])

    def unit_sort(x, c):
        return co.sort(m.one(x), c, (c,))

    def ocomp(s0, op, inner_sorts, inner_ops):
        q = co.ma.p_ob_id(s0, tuple(inner_sorts))
        return o.comp[q, (op, tuple(inner_ops))]

    def slide_in(s, op, i, k):
        """op composed with w(k) at input i and units elsewhere."""
        _, _, ins = co.sort_data(lower_sort[s])
        sorts, ops = [], []
        for j, (xj, cj) in enumerate(ins):
            sorts.append(unit_sort(xj, cj))
            ops.append(k if j == i else co.unit(xj, cj))
        return ocomp(lower_sort[s], op, sorts, ops)

    gens: dict[str, list] = {}
    uf = UnionFind()
    hom10, hom01, hom11 = hc.hom(h1, h0), hc.hom(h0, h1), hc.hom(h1, h1)
    for s, (g, (x, b0), ins) in sdata.items():
        fslots = [i for i, c in enumerate(ins) if is_new(*c)]
        g0s = hom01 if is_new(x, b0) else [None]
        elems = [("O", g0, op, gs) for g0 in g0s for op in o.coll(lower_sort[s])
                 for gs in itertools.product(hom10, repeat=len(fslots))]
        pure = is_new(x, b0) and g == m.one(x) and ins == ((x, b0),)
        if pure:
            elems += [("H", e) for e in hom11]
        gens[s] = elems
        for e in elems:
            uf[(s, e)]
        for e in elems:
            if e[0] != "O":
                continue
            _, g0, op, gs = e
            for jj, i in enumerate(fslots):
                xi, c = ins[i]
                wx = att.w[xi, old_of[xi][c]]
                for k in att.k.morphisms:
                    gs2 = gs[:jj] + (hc.table[att.u.mor[k], gs[jj]],) + gs[jj + 1:]
                    uf.union((s, ("O", g0, op, gs2)), (s, ("O", g0, slide_in(s, op, i, wx[k]), gs)))
            if g0 is not None:
                wx = att.w[x, old_of[x][b0]]
                c0 = lower(x, b0)
                for k in att.k.morphisms:
                    op2 = ocomp(unit_sort(x, c0), wx[k], [lower_sort[s]], [op])
                    uf.union((s, ("O", hc.table[g0, att.u.mor[k]], op, gs)), (s, ("O", g0, op2, gs)))
            if pure and op == co.unit(x, lower(x, b0)):
                uf.union((s, e), (s, ("H", hc.table[g0, gs[0]])))

    classes: dict[str, dict] = {s: {} for s in gens}
    rep_of = {}
    for group in uf.to_sets():
        s = next(iter(group))[0]
        r = min((e for _, e in group), key=ekey)
        classes[s][r] = sorted((e for _, e in group), key=ekey)
        for _, e in group:
            rep_of[s, e] = r

    def find(s, e):
        return rep_of[s, e]

    def lower_el_mor(mid):
        y, c = pt[cb.el.tgt[mid]]
        return pid(cb.proj.mor[mid], eid(lower(y, c)))

    def act_raw(k, e):
        u, v, ws, s, s2 = cb.ma.m1.meta["mor"][k]
        if e[0] == "H":
            return e
        _, g0, op, gs = e
        ua = pid(u, lower_el_mor(v), pid(*(lower_el_mor(w_) for w_ in ws)), lower_sort[s2])
        op2 = o.coll.act(ua, op)
        ins, ins2 = sdata[s][2], sdata[s2][2]
        fpos2 = {i: j for j, i in enumerate(i for i, c in enumerate(ins2) if is_new(*c))}
        alpha = m.src_mor[u].index_map
        gs2 = tuple(gs[fpos2[alpha[i]]] for i, c in enumerate(ins) if is_new(*c))
        return ("O", g0, op2, gs2)

    values = {s: sorted(cl, key=ekey) for s, cl in classes.items()}
    act = {}
    for k, (u, v, ws, s, s2) in cb.ma.m1.meta["mor"].items():
        act[k] = {r: find(s, act_raw(k, r)) for r in values[s2]}
    coll = collection(cb.ma, values, act)

    def compose_raw(s0, p0, sorts, ps):
        if p0[0] == "H":
            p1 = ps[0]
            if p1[0] == "H":
                return ("H", hc.table[p0[1], p1[1]])
            return ("O", hc.table[p0[1], p1[1]], p1[2], p1[3])
        _, g0, op0, gs0 = p0
        ins = sdata[s0][2]
        inner_sorts, inner_ops, new_gs = [], [], []
        j = 0
        for (xi, c), si, pi in zip(ins, sorts, ps):
            if not is_new(xi, c):
                inner_sorts.append(lower_sort[si])
                inner_ops.append(pi[2])
                new_gs.extend(pi[3])
                continue
            gg = gs0[j]
            j += 1
            c0 = lower(xi, c)
            if pi[0] == "H":
                inner_sorts.append(unit_sort(xi, c0))
                inner_ops.append(co.unit(xi, c0))
                new_gs.append(hc.table[gg, pi[1]])
            else:
                _, g0i, opi, gsi = pi
                k = att.uinv[hc.table[gg, g0i]]
                wk = att.w[xi, old_of[xi][c]][k]
                inner_sorts.append(lower_sort[si])
                inner_ops.append(ocomp(unit_sort(xi, c0), wk, [lower_sort[si]], [opi]))
                new_gs.extend(gsi)
        return ("O", g0, ocomp(lower_sort[s0], op0, inner_sorts, inner_ops), tuple(new_gs))

    def fn(f, gs, p0, ps):
        r = compose_raw(f, p0, gs, ps)
        return find(cb.ma.compose(f, gs), r)

    units = {}
    for c, (x, b) in pt.items():
        s = cb.ma.one(c)
        units[c] = find(s, ("H", hc.ident[h1])) if is_new(x, b) else find(s, ("O", None, co.unit(x, b), ()))
    pop = ColouredOperad(cb, operad_from_function(coll, units, fn), name="pushout")
    pop.compose_raw = compose_raw

    incl_f = {x: {b: b for b in a.sets[x]} for x in m.m0.objects}
    phi = {}
    for s in co.ma.m1.objects:
        g, (x, b0), ins = co.sort_data(s)
        sb = cb.multimorphism(g, b0, [c for _, c in ins])
        phi[s] = {op: find(sb, ("O", None, op, ())) for op in o.coll(s)}
    inclusion = ColouredMorphism(co, pop, incl_f, phi)

    psi = {}
    for (x, e) in att.points():
        c0, c1 = att.base[x, e], newname[x][e]
        obs = {h0: c0, h1: c1}
        mors = {}
        one = m.one(x)
        for hm in hc.morphisms:
            src, tgt = hc.src[hm], hc.tgt[hm]
            s = cb.multimorphism(one, obs[tgt], (obs[src],))
            if src == h0 and tgt == h0:
                r = ("O", None, att.w[x, e][att.uinv[hm]], ())
            elif src == h0:
                r = ("O", hm, co.unit(x, c0), ())
            elif tgt == h0:
                r = ("O", None, co.unit(x, c0), (hm,))
            else:
                r = ("H", hm)
            mors[hm] = (s, find(s, r))
        psi[x, e] = {"ob": obs, "mor": mors}
    return PushoutResult(att, pop, inclusion, psi, classes, newname)


def pushout_well_defined(res: PushoutResult, cap: int = 20000) -> Report:
    """Composition does not depend on the chosen members of each class."""
    pop = res.operad
    ma, coll = pop.ma, pop.operad.coll
    rep = Report("pushout composition well defined", arity_bound=pop.m.bound)
    w, n = None, 0
    for q, (f, gs) in ma.composable.meta["ob"].items():
        tgt = ma.comp.ob[q]
        for p0 in coll(f):
            for ps in itertools.product(*(coll(g) for g in gs)):
                want = pop.operad.comp[q, (p0, ps)]
                choices = [res.classes[f][p0]] + [res.classes[g][p] for g, p in zip(gs, ps)]
                for pos, members in enumerate(choices):
                    for mem in members:
                        n += 1
                        if n > cap:
                            raise CapExceeded(f"more than {cap} member compositions")
                        args = [p0] + list(ps)
                        args[pos] = mem
                        got = pop.compose_raw(f, args[0], gs, tuple(args[1:]))
                        cls = next((r for r, ms in res.classes[tgt].items() if got in ms), None)
                        if cls != want:
                            w = (q, p0, ps, pos, mem)
                            break
                    if w:
                        break
                if w:
                    break
            if w:
                break
        if w:
            break
    rep.add("members compose to the same class", w)
    return rep


def _parametrized_functors(res: PushoutResult, g: ColouredMorphism, tgt: ColouredOperad) -> list:
    """Every functor F x H -> underlying categories of tgt agreeing with g on F x K,
    natural in the objects of m0.  Returned as canonical keys."""
    att, m = res.attachment, res.attachment.co.m
    hc, h0, h1 = att.h, att.h0, att.h1
    r = tgt.operad
    per_point = {}
    for (x, e) in att.points():
        c0 = g.f[x][att.base[x, e]]
        opts = []
        for d1 in tgt.colours.sets[x]:
            obs = {h0: c0, h1: d1}
            sorts = {hm: tgt.sort(m.one(x), obs[hc.tgt[hm]], (obs[hc.src[hm]],)) for hm in hc.morphisms}
            fixed = {}
            for k in att.k.morphisms:
                s_a = att.co.sort(m.one(x), att.base[x, e], (att.base[x, e],))
                fixed[att.u.mor[k]] = g.phi[s_a][att.w[x, e][k]]
            fixed[hc.ident[h1]] = tgt.unit(x, d1)
            free = [hm for hm in hc.morphisms if hm not in fixed]
            for vals in itertools.product(*(r.coll(sorts[hm]) for hm in free)):
                mp = dict(fixed)
                mp.update(zip(free, vals))
                good = True
                for (h2, h1_), hh in hc.table.items():
                    if hc.src[h2] != hc.tgt[h1_]:
                        continue
                    got = r.comp[tgt.ma.p_ob_id(sorts[h2], (sorts[h1_],)), (mp[h2], (mp[h1_],))]
                    if got != mp[hh]:
                        good = False
                        break
                if good:
                    opts.append((d1, tuple(sorted(mp.items()))))
        per_point[x, e] = opts
    keys = list(per_point)
    out = []
    for choice in itertools.product(*(per_point[k] for k in keys)):
        sel = dict(zip(keys, choice))
        good = True
        for v in m.m0.morphisms:
            x, y = m.m0.src[v], m.m0.tgt[v]
            for e in att.new.sets[y]:
                ex = att.new.maps[v][e]
                dy, my = sel[y, e]
                dx, mx = sel[x, ex]
                if tgt.colours.maps[v][dy] != dx:
                    good = False
                    break
                mxd = dict(mx)
                obs = {h0: g.f[y][att.base[y, e]], h1: dy}
                for hm, op in my:
                    mor = _unary_mor(tgt.cc, v, obs[hc.tgt[hm]], obs[hc.src[hm]])
                    if r.coll.act(mor, op) != mxd[hm]:
                        good = False
                        break
                if not good:
                    break
            if not good:
                break
        if good:
            out.append(tuple(sorted(sel.items(), key=ekey)))
    return out


def cocones(res: PushoutResult, tgt: ColouredOperad, cap: int = 1 << 18) -> set:
    out = set()
    for g in coloured_morphisms(res.attachment.co, tgt, cap):
        for fk in _parametrized_functors(res, g, tgt):
            out.add((g.key(), fk))
    return out


def cocone_of(res: PushoutResult, med: ColouredMorphism) -> tuple:
    """The cocone obtained by precomposing a map out of the pushout with both legs."""
    g = res.inclusion.then(med)
    g._mf = None
    sel = {}
    for (x, e), data in res.psi.items():
        d1 = med.f[x][res.newname[x][e]]
        mp = {hm: med.phi[s][p] for hm, (s, p) in data["mor"].items()}
        sel[x, e] = (d1, tuple(sorted(mp.items())))
    return (g.key(), tuple(sorted(sel.items(), key=ekey)))


def universal_property_report(res: PushoutResult, targets, cap: int = 1 << 18) -> Report:
    """For each target, maps out of (B, P) correspond bijectively to cocones."""
    rep = Report("pushout universal property", arity_bound=res.operad.m.bound)
    for i, tgt in enumerate(targets):
        cs = cocones(res, tgt, cap)
        meds = coloured_morphisms(res.operad, tgt, cap)
        images = [cocone_of(res, med) for med in meds]
        w = None
        if len(set(images)) != len(images):
            w = ("two maps give the same cocone", tgt.name)
        elif set(images) != cs:
            w = ("cocones without a map", tgt.name, len(cs), len(set(images)))
        rep.add(f"target {i} {tgt.name}: {len(cs)} cocones", w)
    return rep
