"""F-multicategories: multimorphisms with a finite sequence of sources.

An F-multicategory is stored as two finite categories m0 (objects) and m1
(multimorphisms), a source assignment into the completion F m0, a target
functor, a unit functor and a composition defined on the composability
category m1 x_{F m0} F m1, truncated at the arity bound.
"""
from __future__ import annotations

import itertools
from collections import defaultdict
from typing import Any, Callable, Sequence

from .completion import FCMor, FCategoryView, fc_compose, fc_identity, fc_is_morphism, mu_on_morphism
from .fincat import (CategoryError, FinCategory, Functor, find_isomorphisms, identity_functor,
                     isofibration_witness, opposite, pid, right_fibration_witness, terminal)
from .report import Report

CompOb = Callable[[str, tuple], str]
CompMor = Callable[[str, tuple, tuple, tuple], str]


class FMulticategory:
    def __init__(self, m0: FinCategory, m1: FinCategory, src_ob: dict[str, tuple],
                 src_mor: dict[str, FCMor], target: Functor, unit: Functor,
                 comp_ob: CompOb, comp_mor: CompMor, bound: int = 4, name: str = ""):
        self.m0, self.m1 = m0, m1
        self.src_ob = {k: tuple(v) for k, v in src_ob.items()}
        self.src_mor = dict(src_mor)
        self.target, self.unit = target, unit
        self.bound = bound
        self.name = name
        self._comp_ob_fn, self._comp_mor_fn = comp_ob, comp_mor
        self._p: FinCategory | None = None
        self._comp: Functor | None = None
        self.overrides: dict[str, str] = {}
        # set by constructors whose untruncated version has lifts of larger arity
        self.lift_exceeds_bound: Callable[[str, str], bool] | None = None

    # -- basic queries
    def arity(self, f: str) -> int:
        return len(self.src_ob[f])

    def t(self, f: str) -> str:
        return self.target.ob[f]

    def t_mor(self, u: str) -> str:
        return self.target.mor[u]

    def one(self, x: str) -> str:
        return self.unit.ob[x]

    def one_mor(self, v: str) -> str:
        return self.unit.mor[v]

    @property
    def composable(self) -> FinCategory:
        """m1 x_{F m0} F m1 restricted to total arity <= bound.

        meta["ob"] : id -> (f, gs); meta["mor"] : id -> (u, vs, src id, tgt id).
        """
        if self._p is None:
            self._p = self._build_composable()
        return self._p

    def p_ob_id(self, f: str, gs: Sequence[str]) -> str:
        return pid(f, pid(*gs))

    def p_mor_id(self, u: str, vs: Sequence[str], tgt: str) -> str:
        return pid(u, pid(*vs), tgt)

    def _build_composable(self) -> FinCategory:
        m1 = self.m1
        by_target = defaultdict(list)
        for g in m1.objects:
            by_target[self.t(g)].append(g)
        obs, obdata = [], {}
        by_first = defaultdict(list)
        for f in m1.objects:
            for gs in itertools.product(*(by_target[x] for x in self.src_ob[f])):
                if sum(self.arity(g) for g in gs) > self.bound:
                    continue
                o = self.p_ob_id(f, gs)
                obs.append(o)
                obdata[o] = (f, gs)
                by_first[f].append(o)
        ms, mdata = {}, {}
        for u in m1.morphisms:
            f, f2 = m1.src[u], m1.tgt[u]
            su = self.src_mor[u]
            for o in by_first[f]:
                gs = obdata[o][1]
                for o2 in by_first[f2]:
                    gs2 = obdata[o2][1]
                    choices = []
                    for i, a in enumerate(su.index_map):
                        choices.append([v for v in m1.hom(gs[i], gs2[a])
                                        if self.t_mor(v) == su.components[i]])
                    for vs in itertools.product(*choices):
                        mid = self.p_mor_id(u, vs, o2)
                        ms[mid] = (o, o2)
                        mdata[mid] = (u, vs, o, o2)
        out = defaultdict(list)
        for mid, (o, o2) in ms.items():
            out[o].append(mid)
        by_key = {(u, vs, o2): mid for mid, (u, vs, o, o2) in mdata.items()}
        m1_table = m1.table
        table = {}
        for m1id, (u1, vs1, o, o2) in mdata.items():
            pairs = tuple(zip(self.src_mor[u1].index_map, vs1))
            for m2id in out[o2]:
                u2, vs2, _, o3 = mdata[m2id]
                vs = tuple(m1_table[vs2[a], v] for a, v in pairs)
                c = by_key.get((m1_table[u2, u1], vs, o3))
                if c is None:
                    raise CategoryError(f"composite of {m2id} and {m1id} is not a morphism of the composability category")
                table[m2id, m1id] = c
        ident = {o: self.p_mor_id(m1.ident[f], tuple(m1.ident[g] for g in gs), o)
                 for o, (f, gs) in obdata.items()}
        p = FinCategory(obs, ms, ident, table, name="composable", check=False)
        p.meta["ob"] = obdata
        p.meta["mor"] = mdata
        p.meta["by_first"] = dict(by_first)
        p.meta["mor_by_first"] = _group(mdata, lambda d: d[0])
        return p

    @property
    def comp(self) -> Functor:
        """The composition functor on the composability category."""
        if self._comp is None:
            p = self.composable
            ob = {o: self._comp_ob_fn(f, gs) for o, (f, gs) in p.meta["ob"].items()}
            mor = {}
            for mid, (u, vs, o, o2) in p.meta["mor"].items():
                mor[mid] = self._comp_mor_fn(u, vs, p.meta["ob"][o][1], p.meta["ob"][o2][1])
            mor.update(self.overrides)
            self._comp = Functor(p, self.m1, ob, mor, check=False)
        return self._comp

    def compose(self, f: str, gs: Sequence[str]) -> str:
        return self.comp.ob[self.p_ob_id(f, gs)]

    def compose_mor(self, u: str, vs: Sequence[str], tgt_gs: Sequence[str]) -> str:
        f2 = self.m1.tgt[u]
        return self.comp.mor[self.p_mor_id(u, vs, self.p_ob_id(f2, tgt_gs))]

    def with_override(self, p_mor: str, value: str) -> "FMulticategory":
        """A copy whose composition is changed on one morphism (fault injection)."""
        m = FMulticategory(self.m0, self.m1, self.src_ob, self.src_mor, self.target, self.unit,
                           self._comp_ob_fn, self._comp_mor_fn, self.bound, self.name + "*")
        m._p = self._p
        m.overrides = dict(self.overrides)
        m.overrides[p_mor] = value
        return m

    def fc0(self) -> FCategoryView:
        return FCategoryView(self.m0, self.bound)

    def __repr__(self) -> str:
        return (f"FMulticategory({self.name}: {len(self.m0.objects)} objects, "
                f"{len(self.m1.objects)} multimorphisms, bound {self.bound})")


def _group(d: dict, key) -> dict:
    out = defaultdict(list)
    for k, v in d.items():
        out[key(v)].append(k)
    return dict(out)


# -- axiom checks

def _concat(xs):
    return tuple(a for block in xs for a in block)


def check_fmulticategory(m: FMulticategory) -> Report:
    rep = Report(f"F-multicategory {m.name}", arity_bound=m.bound)
    m0, m1 = m.m0, m.m1

    # well-formedness of the data
    bad = None
    try:
        m.target.validate()
        m.unit.validate()
    except CategoryError as e:
        bad = str(e)
    if bad is None:
        for u in m1.morphisms:
            f, f2 = m1.src[u], m1.tgt[u]
            if not fc_is_morphism(m0, m.src_ob[f], m.src_ob[f2], m.src_mor[u]):
                bad = ("source of morphism is not a morphism of F m0", u)
                break
        else:
            for x in m1.objects:
                if m.src_mor[m1.ident[x]] != fc_identity(m0, m.src_ob[x]):
                    bad = ("source does not preserve the identity", x)
                    break
            else:
                for (g, f), h in m1.table.items():
                    if fc_compose(m0, m.src_mor[g], m.src_mor[f]) != m.src_mor[h]:
                        bad = ("source does not preserve composition", g, f)
                        break
    if bad is None:
        try:
            comp = m.comp
            for o, r in comp.ob.items():
                if r not in m1.ident:
                    raise CategoryError(f"composite of {o} is not a multimorphism")
            for mid, r in comp.mor.items():
                if r not in m1.src:
                    raise CategoryError(f"composite of {mid} is not a morphism")
            comp.validate()
        except (CategoryError, KeyError) as e:
            bad = ("composition is not a functor", str(e))
    rep.add("well-formed", bad)
    if bad is not None:
        return rep
    p = m.composable
    comp = m.comp

    # (1) unit is a section of t and has unary identity source
    w = None
    for x in m0.objects:
        e = m.one(x)
        if m.t(e) != x or m.src_ob[e] != (x,):
            w = ("unit object", x)
            break
    if w is None:
        for v in m0.morphisms:
            e = m.one_mor(v)
            if m.t_mor(e) != v or m.src_mor[e] != FCMor((0,), (v,)):
                w = ("unit morphism", v)
                break
    rep.add("unit source/target", w)

    # (2) source and target of composites
    w = None
    for o, (f, gs) in p.meta["ob"].items():
        r = comp.ob[o]
        if m.t(r) != m.t(f):
            w = ("target of composite", o)
            break
        if m.src_ob[r] != _concat(m.src_ob[g] for g in gs):
            w = ("source of composite", o)
            break
    if w is None:
        for mid, (u, vs, o, o2) in p.meta["mor"].items():
            r = comp.mor[mid]
            if m.t_mor(r) != m.t_mor(u):
                w = ("target of composite morphism", mid)
                break
            gs, gs2 = p.meta["ob"][o][1], p.meta["ob"][o2][1]
            expect = mu_on_morphism([m.src_ob[g] for g in gs], [m.src_ob[g] for g in gs2],
                                    m.src_mor[u].index_map, [m.src_mor[v] for v in vs])
            if m.src_mor[r] != expect:
                w = ("source of composite morphism", mid)
                break
    rep.add("composite source/target", w)

    rep.add("associativity", _assoc_witness(m))
    rep.add("unitality", _unit_witness(m))
    return rep


def _assoc_witness(m: FMulticategory):
    p, comp = m.composable, m.comp
    obdata = p.meta["ob"]
    by_first = p.meta["by_first"]
    mdata = p.meta["mor"]
    ob_key = {(f, gs): o for o, (f, gs) in obdata.items()}
    comp_ob = {k: comp.ob[o] for k, o in ob_key.items()}
    mor_key = {(u, vs, o2): comp.mor[mid] for mid, (u, vs, o, o2) in mdata.items()}
    width = {o: len(m.src_ob[comp.ob[o]]) for o in obdata}
    bound = m.bound
    # objects
    for o, (f, gs) in obdata.items():
        for inner in itertools.product(*(by_first.get(g, []) for g in gs)):
            if sum(width[q] for q in inner) > m.bound:
                continue
            flat = _concat(obdata[q][1] for q in inner)
            left = comp_ob.get((comp.ob[o], flat))
            right = comp_ob.get((f, tuple(comp.ob[q] for q in inner)))
            if left is None or right is None:
                return ("composite not composable", o, inner)
            if left != right:
                return ("objects", o, inner)
    # morphisms: pick the target inner objects first, then inner morphisms into them
    into = defaultdict(list)
    for q, (v, _, qo, qo2) in mdata.items():
        into[v, qo2].append(q)
    comp_mor = comp.mor
    q_width = {q: width[d[2]] for q, d in mdata.items()}
    q_vs = {q: d[1] for q, d in mdata.items()}
    for mid, (u, vs, o, o2) in mdata.items():
        gs2 = obdata[o2][1]
        alpha = m.src_mor[u].index_map
        cu = comp.mor[mid]
        co2 = comp.ob[o2]
        f2 = m.m1.tgt[u]
        for tgt_seq in itertools.product(*(by_first.get(g, []) for g in gs2)):
            if sum(width[q] for q in tgt_seq) > m.bound:
                continue
            tgt_flat = _concat(obdata[q][1] for q in tgt_seq)
            lt = ob_key.get((co2, tgt_flat))
            rt = ob_key.get((f2, tuple(comp.ob[q] for q in tgt_seq)))
            if lt is None or rt is None:
                return ("composite not composable", o2, tgt_seq)
            for qs in itertools.product(*(into[v, tgt_seq[a]] for v, a in zip(vs, alpha))):
                if sum(map(q_width.__getitem__, qs)) > bound:
                    continue
                ws = tuple(w for q in qs for w in q_vs[q])
                left = mor_key.get((cu, ws, lt))
                right = mor_key.get((u, tuple(map(comp_mor.__getitem__, qs)), rt))
                if left is None or right is None:
                    return ("composite morphism not composable", mid, qs)
                if left != right:
                    return ("morphisms", mid, qs)
    return None


def _unit_witness(m: FMulticategory):
    comp, m1 = m.comp, m.m1
    for f in m1.objects:
        left = m.p_ob_id(m.one(m.t(f)), (f,))
        right = m.p_ob_id(f, tuple(m.one(x) for x in m.src_ob[f]))
        if comp.ob.get(left) != f:
            return ("left unit", f)
        if comp.ob.get(right) != f:
            return ("right unit", f)
    for u in m1.morphisms:
        f, f2 = m1.src[u], m1.tgt[u]
        lm = m.p_mor_id(m.one_mor(m.t_mor(u)), (u,), m.p_ob_id(m.one(m.t(f2)), (f2,)))
        su = m.src_mor[u]
        rm = m.p_mor_id(u, tuple(m.one_mor(c) for c in su.components),
                        m.p_ob_id(f2, tuple(m.one(x) for x in m.src_ob[f2])))
        if comp.mor.get(lm) != u:
            return ("left unit on morphism", u)
        if comp.mor.get(rm) != u:
            return ("right unit on morphism", u)
    return None


def target_right_fibrant_report(m: FMulticategory) -> Report:
    rep = Report(f"target right fibrancy of {m.name}", arity_bound=m.bound)
    excused = []

    def excuse(v, f):
        # a lift that would leave the arity bound is not required of the truncation
        if m.lift_exceeds_bound is not None and m.lift_exceeds_bound(v, f):
            excused.append((v, f))
            return True
        return False

    w = right_fibration_witness(m.target, excuse)
    rep.add("target is a right fibration", w,
            detail=f"{len(excused)} lifts beyond the arity bound not required" if excused else "")
    rep.add("composition is an isofibration", isofibration_witness(m.comp))
    return rep


def is_target_right_fibrant(m: FMulticategory) -> bool:
    return target_right_fibrant_report(m).ok


# -- constructors

def perm_id(n: int, perm: Sequence[int]) -> str:
    return f"{n}:" + ",".join(map(str, perm))


def block_permutation(delta: Sequence[int], ks: Sequence[int],
                      etas: Sequence[Sequence[int]] | None = None) -> tuple[int, ...]:
    """One-line notation of delta_{k_1..k_n} after (eta_1 + ... + eta_n).

    Block i of size ks[i] is sent, after applying etas[i] inside the block,
    to the position of block delta[i] in the target arrangement.
    """
    n = len(ks)
    tks = [0] * n
    for i, d in enumerate(delta):
        tks[d] = ks[i]
    offs = list(itertools.accumulate([0] + tks[:-1])) if n else []
    out = []
    for i in range(n):
        eta = etas[i] if etas is not None else range(ks[i])
        out.extend(offs[delta[i]] + r for r in eta)
    return tuple(out)


def sigma_star(bound: int = 3) -> FMulticategory:
    """The symmetric groupoid: one object, the n-ary multimorphisms form B Sigma_n."""
    m0 = terminal()
    obs = [str(n) for n in range(bound + 1)]
    ms, table, ident, perm = {}, {}, {}, {}
    for n in range(bound + 1):
        ps = list(itertools.permutations(range(n)))
        for p in ps:
            ms[perm_id(n, p)] = (str(n), str(n))
            perm[perm_id(n, p)] = p
        for g in ps:
            for f in ps:
                table[perm_id(n, g), perm_id(n, f)] = perm_id(n, tuple(g[i] for i in f))
        ident[str(n)] = perm_id(n, tuple(range(n)))
    m1 = FinCategory(obs, ms, ident, table, name=f"Sigma<={bound}", check=False)
    m1.meta["perm"] = perm
    src_ob = {str(n): ("*",) * n for n in range(bound + 1)}
    src_mor = {mid: FCMor(p, ("id_*",) * len(p)) for mid, p in perm.items()}
    target = Functor(m1, m0, {x: "*" for x in obs}, {mid: "id_*" for mid in ms}, check=False)
    unit = Functor(m0, m1, {"*": "1"}, {"id_*": perm_id(1, (0,))}, check=False)

    def comp_ob(f, gs):
        return str(sum(int(g) for g in gs))

    def comp_mor(u, vs, gs, gs2):
        ks = [int(g) for g in gs]
        p = block_permutation(perm[u], ks, [perm[v] for v in vs])
        return perm_id(len(p), p)

    return FMulticategory(m0, m1, src_ob, src_mor, target, unit, comp_ob, comp_mor, bound,
                          name=f"sigma_star({bound})")


def nonsym(bound: int = 4) -> FMulticategory:
    """The discrete multicategory of natural numbers: nonsymmetric operads."""
    m0 = terminal()
    obs = [str(n) for n in range(bound + 1)]
    ms = {f"id_{n}": (n, n) for n in obs}
    m1 = FinCategory(obs, ms, {n: f"id_{n}" for n in obs},
                     {(f"id_{n}", f"id_{n}"): f"id_{n}" for n in obs}, name=f"N<={bound}", check=False)
    src_ob = {str(n): ("*",) * n for n in range(bound + 1)}
    src_mor = {f"id_{n}": FCMor(tuple(range(n)), ("id_*",) * n) for n in range(bound + 1)}
    target = Functor(m1, m0, {x: "*" for x in obs}, {mid: "id_*" for mid in ms}, check=False)
    unit = Functor(m0, m1, {"*": "1"}, {"id_*": "id_1"}, check=False)
    return FMulticategory(m0, m1, src_ob, src_mor, target, unit,
                          lambda f, gs: str(sum(int(g) for g in gs)),
                          lambda u, vs, gs, gs2: f"id_{sum(int(g) for g in gs)}",
                          bound, name=f"nonsym({bound})")


def constant_multicat(c: FinCategory, bound: int = 4) -> FMulticategory:
    """m0 = m1 = c, every multimorphism unary with source (x) and target x."""
    src_ob = {x: (x,) for x in c.objects}
    src_mor = {u: FCMor((0,), (u,)) for u in c.morphisms}
    idf = identity_functor(c)
    return FMulticategory(c, c, src_ob, src_mor, idf, idf,
                          lambda f, gs: f, lambda u, vs, gs, gs2: u, bound,
                          name=f"constant({c.name})")


def empty_multicat(bound: int = 4) -> FMulticategory:
    e = FinCategory([], {}, {}, {}, name="empty")
    idf = identity_functor(e)
    return FMulticategory(e, e, {}, {}, idf, idf, lambda f, gs: f, lambda u, vs, gs, gs2: u,
                          bound, name="empty")


def colour_change(m: FMulticategory, f: Functor) -> FMulticategory:
    """F*M for f : A -> m0.  Multimorphisms are (g, a, (a_1..a_n)) lying over g."""
    a_cat = f.dom
    if f.cod != m.m0:
        raise CategoryError("colour change needs a functor into the object category")
    fib = defaultdict(list)
    for a in a_cat.objects:
        fib[f.ob[a]].append(a)
    m1 = m.m1
    obs, obdata = [], {}
    by_g = defaultdict(list)
    for g in m1.objects:
        for a in fib[m.t(g)]:
            for ins in itertools.product(*(fib[x] for x in m.src_ob[g])):
                o = pid(g, a, pid(*ins))
                obs.append(o)
                obdata[o] = (g, a, tuple(ins))
                by_g[g].append(o)
    ms, mdata = {}, {}
    for u in m1.morphisms:
        g, g2 = m1.src[u], m1.tgt[u]
        su = m.src_mor[u]
        tu = m.t_mor(u)
        for o in by_g[g]:
            _, a, ins = obdata[o]
            for o2 in by_g[g2]:
                _, a2, ins2 = obdata[o2]
                vs = [v for v in a_cat.hom(a, a2) if f.mor[v] == tu]
                choices = [[w for w in a_cat.hom(ins[i], ins2[j]) if f.mor[w] == su.components[i]]
                           for i, j in enumerate(su.index_map)]
                for v in vs:
                    for ws in itertools.product(*choices):
                        mid = pid(u, v, pid(*ws), o2)
                        ms[mid] = (o, o2)
                        mdata[mid] = (u, v, tuple(ws), o, o2)
    out = _group({k: v[3] for k, v in mdata.items()}, lambda s: s)
    table = {}
    for k1, (u1, v1, ws1, o, o2) in mdata.items():
        alpha = m.src_mor[u1].index_map
        for k2 in out.get(o2, []):
            u2, v2, ws2, _, o3 = mdata[k2]
            ws = tuple(a_cat.table[ws2[alpha[i]], w] for i, w in enumerate(ws1))
            table[k2, k1] = pid(m1.table[u2, u1], a_cat.table[v2, v1], pid(*ws), o3)
    ident = {}
    for o, (g, a, ins) in obdata.items():
        ident[o] = pid(m1.ident[g], a_cat.ident[a], pid(*(a_cat.ident[x] for x in ins)), o)
    n1 = FinCategory(obs, ms, ident, table, name="F*M1", check=False)
    n1.meta["ob"] = obdata
    n1.meta["mor"] = mdata
    src_ob = {o: ins for o, (g, a, ins) in obdata.items()}
    src_mor = {k: FCMor(m.src_mor[u].index_map, ws) for k, (u, v, ws, o, o2) in mdata.items()}
    target = Functor(n1, a_cat, {o: d[1] for o, d in obdata.items()},
                     {k: d[1] for k, d in mdata.items()}, check=False)
    unit_ob = {a: pid(m.one(f.ob[a]), a, pid(a)) for a in a_cat.objects}
    unit_mor = {v: pid(m.one_mor(f.mor[v]), v, pid(v), unit_ob[a_cat.tgt[v]]) for v in a_cat.morphisms}
    unit = Functor(a_cat, n1, unit_ob, unit_mor, check=False)

    def comp_ob(o, gs):
        g, a, _ = obdata[o]
        inner = [obdata[q] for q in gs]
        r = m.compose(g, [d[0] for d in inner])
        return pid(r, a, pid(*_concat(d[2] for d in inner)))

    def comp_mor(k, ks, gs, gs2):
        u, v, _, o, o2 = mdata[k]
        inner = [mdata[q] for q in ks]
        tgt_inner = [obdata[q][0] for q in gs2]
        r = m.compose_mor(u, [d[0] for d in inner], tgt_inner)
        t_ob = comp_ob(o2, gs2)
        return pid(r, v, pid(*_concat(d[2] for d in inner)), t_ob)

    return FMulticategory(a_cat, n1, src_ob, src_mor, target, unit, comp_ob, comp_mor, m.bound,
                          name=f"colour_change({m.name})")


def _tag(tag: str, x: str) -> str:
    return f"{tag}.{x}"


def _tag_category(c: FinCategory, tag: str) -> tuple[list, dict, dict, dict]:
    obs = [_tag(tag, x) for x in c.objects]
    ms = {_tag(tag, u): (_tag(tag, c.src[u]), _tag(tag, c.tgt[u])) for u in c.morphisms}
    ident = {_tag(tag, x): _tag(tag, c.ident[x]) for x in c.objects}
    table = {(_tag(tag, g), _tag(tag, f)): _tag(tag, h) for (g, f), h in c.table.items()}
    return obs, ms, ident, table


def category_coproduct(c: FinCategory, d: FinCategory) -> FinCategory:
    o1, m1, i1, t1 = _tag_category(c, "0")
    o2, m2, i2, t2 = _tag_category(d, "1")
    return FinCategory(o1 + o2, {**m1, **m2}, {**i1, **i2}, {**t1, **t2},
                       name=f"{c.name}+{d.name}", check=False)


def coproduct(m: FMulticategory, n: FMulticategory) -> FMulticategory:
    if m.bound != n.bound:
        raise ValueError("coproduct needs equal arity bounds")
    c0 = category_coproduct(m.m0, n.m0)
    c1 = category_coproduct(m.m1, n.m1)
    parts = {"0": m, "1": n}

    def split(x):
        tag, _, rest = x.partition(".")
        return tag, rest

    src_ob, src_mor = {}, {}
    for tag, k in parts.items():
        for f in k.m1.objects:
            src_ob[_tag(tag, f)] = tuple(_tag(tag, x) for x in k.src_ob[f])
        for u in k.m1.morphisms:
            su = k.src_mor[u]
            src_mor[_tag(tag, u)] = FCMor(su.index_map, tuple(_tag(tag, x) for x in su.components))
    t_ob, t_mor, u_ob, u_mor = {}, {}, {}, {}
    for tag, k in parts.items():
        for f in k.m1.objects:
            t_ob[_tag(tag, f)] = _tag(tag, k.t(f))
        for u in k.m1.morphisms:
            t_mor[_tag(tag, u)] = _tag(tag, k.t_mor(u))
        for x in k.m0.objects:
            u_ob[_tag(tag, x)] = _tag(tag, k.one(x))
        for v in k.m0.morphisms:
            u_mor[_tag(tag, v)] = _tag(tag, k.one_mor(v))

    def comp_ob(f, gs):
        tag, f0 = split(f)
        return _tag(tag, parts[tag].compose(f0, [split(g)[1] for g in gs]))

    def comp_mor(u, vs, gs, gs2):
        tag, u0 = split(u)
        return _tag(tag, parts[tag].compose_mor(u0, [split(v)[1] for v in vs],
                                                [split(g)[1] for g in gs2]))

    return FMulticategory(c0, c1, src_ob, src_mor, Functor(c1, c0, t_ob, t_mor, check=False),
                          Functor(c0, c1, u_ob, u_mor, check=False), comp_ob, comp_mor, m.bound,
                          name=f"{m.name}+{n.name}")


def coproduct_inclusions(m: FMulticategory, n: FMulticategory, mn: FMulticategory):
    out = []
    for tag, k in (("0", m), ("1", n)):
        phi0 = Functor(k.m0, mn.m0, {x: _tag(tag, x) for x in k.m0.objects},
                       {v: _tag(tag, v) for v in k.m0.morphisms}, check=False)
        phi1 = Functor(k.m1, mn.m1, {x: _tag(tag, x) for x in k.m1.objects},
                       {v: _tag(tag, v) for v in k.m1.morphisms}, check=False)
        out.append(MultiFunctor(k, mn, phi0, phi1))
    return out


# -- multifunctors

class MultiFunctor:
    def __init__(self, dom: FMulticategory, cod: FMulticategory, phi0: Functor, phi1: Functor):
        self.dom, self.cod = dom, cod
        self.phi0, self.phi1 = phi0, phi1

    def check(self) -> Report:
        m, n = self.dom, self.cod
        p0, p1 = self.phi0, self.phi1
        rep = Report("multifunctor", arity_bound=m.bound)
        w = None
        try:
            p0.validate()
            p1.validate()
        except CategoryError as e:
            w = str(e)
        rep.add("functors", w)
        if w is not None:
            return rep
        w = None
        for f in m.m1.objects:
            if n.t(p1.ob[f]) != p0.ob[m.t(f)] or n.src_ob[p1.ob[f]] != tuple(p0.ob[x] for x in m.src_ob[f]):
                w = ("object", f)
                break
        if w is None:
            for u in m.m1.morphisms:
                su, sv = m.src_mor[u], n.src_mor[p1.mor[u]]
                if n.t_mor(p1.mor[u]) != p0.mor[m.t_mor(u)] or sv != FCMor(
                        su.index_map, tuple(p0.mor[c] for c in su.components)):
                    w = ("morphism", u)
                    break
        rep.add("source and target", w)
        w = None
        for x in m.m0.objects:
            if p1.ob[m.one(x)] != n.one(p0.ob[x]):
                w = ("unit", x)
        for v in m.m0.morphisms:
            if p1.mor[m.one_mor(v)] != n.one_mor(p0.mor[v]):
                w = ("unit morphism", v)
        rep.add("units", w)
        w = None
        pm = m.composable
        for o, (f, gs) in pm.meta["ob"].items():
            if p1.ob[m.comp.ob[o]] != n.compose(p1.ob[f], [p1.ob[g] for g in gs]):
                w = ("composite", o)
                break
        if w is None:
            for mid, (u, vs, o, o2) in pm.meta["mor"].items():
                gs2 = pm.meta["ob"][o2][1]
                if p1.mor[m.comp.mor[mid]] != n.compose_mor(p1.mor[u], [p1.mor[v] for v in vs],
                                                            [p1.ob[g] for g in gs2]):
                    w = ("composite morphism", mid)
                    break
        rep.add("composition", w)
        return rep

    def then(self, other: "MultiFunctor") -> "MultiFunctor":
        return MultiFunctor(self.dom, other.cod, self.phi0.then(other.phi0), self.phi1.then(other.phi1))


def identity_multifunctor(m: FMulticategory) -> MultiFunctor:
    return MultiFunctor(m, m, identity_functor(m.m0), identity_functor(m.m1))


def find_multicat_isomorphism(m: FMulticategory, n: FMulticategory, caps=None) -> MultiFunctor | None:
    """Exhaustive search for an isomorphism of F-multicategories."""
    for p0 in find_isomorphisms(m.m0, n.m0, caps):
        def accept(p1, p0=p0):
            return MultiFunctor(m, n, p0, p1).check().ok
        for p1 in find_isomorphisms(m.m1, n.m1, caps,
                                    ob_hint=lambda f, g: m.arity(f) == n.arity(g)
                                    and p0.ob[m.t(f)] == n.t(g)):
            if accept(p1):
                return MultiFunctor(m, n, p0, p1)
    return None


# -- double categories

class DoubleCategory:
    """A strict double category with horizontal composition defined on `pairs`,
    a full subcategory of d1 x_{d0} d1 whose objects are (f, g) with s(f) = t(g)."""

    def __init__(self, d0: FinCategory, d1: FinCategory, source: Functor, target: Functor,
                 unit: Functor, pairs: FinCategory, comp: Functor, p1: Functor, p2: Functor,
                 name: str = ""):
        self.d0, self.d1 = d0, d1
        self.source, self.target, self.unit = source, target, unit
        self.pairs, self.comp = pairs, comp
        self.p1, self.p2 = p1, p2
        self.name = name
        self._pair_index = {(p1.ob[o], p2.ob[o]): o for o in pairs.objects}
        self._pair_mor_index = {(p1.mor[u], p2.mor[u]): u for u in pairs.morphisms}

    def pair(self, f: str, g: str) -> str | None:
        return self._pair_index.get((f, g))

    def pair_mor(self, u: str, v: str) -> str | None:
        return self._pair_mor_index.get((u, v))

    def hcomp(self, f: str, g: str) -> str | None:
        o = self.pair(f, g)
        return None if o is None else self.comp.ob[o]

    def hcomp_mor(self, u: str, v: str) -> str | None:
        o = self.pair_mor(u, v)
        return None if o is None else self.comp.mor[o]

    def op(self) -> "DoubleCategory":
        return DoubleCategory(opposite(self.d0), opposite(self.d1), self.source.op(), self.target.op(),
                              self.unit.op(), opposite(self.pairs), self.comp.op(), self.p1.op(),
                              self.p2.op(), name=self.name + "^op")


def double_from_data(d0: FinCategory, d1: FinCategory, source: Functor, target: Functor,
                     unit: Functor, comp_ob, comp_mor, name: str = "") -> DoubleCategory:
    """Build a double category; comp_ob(f, g) / comp_mor(u, v) return None outside the bound."""
    pb, p1, p2 = _pairs(source, target)
    keep = [o for o in pb.objects if comp_ob(p1.ob[o], p2.ob[o]) is not None]
    from .fincat import full_subcategory
    pairs = full_subcategory(pb, keep)
    p1 = Functor(pairs, d1, {o: p1.ob[o] for o in keep}, {u: p1.mor[u] for u in pairs.morphisms}, check=False)
    p2 = Functor(pairs, d1, {o: p2.ob[o] for o in keep}, {u: p2.mor[u] for u in pairs.morphisms}, check=False)
    comp = Functor(pairs, d1, {o: comp_ob(p1.ob[o], p2.ob[o]) for o in keep},
                   {u: comp_mor(p1.mor[u], p2.mor[u]) for u in pairs.morphisms}, check=False)
    return DoubleCategory(d0, d1, source, target, unit, pairs, comp, p1, p2, name)


def _pairs(source: Functor, target: Functor):
    from .fincat import pullback_category
    return pullback_category(source, target)


def check_double_category(d: DoubleCategory) -> Report:
    rep = Report(f"double category {d.name}")
    w = None
    try:
        for fn in (d.source, d.target, d.unit, d.comp):
            fn.validate()
    except CategoryError as e:
        w = str(e)
    rep.add("functors", w)
    if w is not None:
        return rep
    w = None
    for x in d.d0.objects:
        e = d.unit.ob[x]
        if d.source.ob[e] != x or d.target.ob[e] != x:
            w = ("unit", x)
    rep.add("unit source/target", w)
    w = None
    for o in d.pairs.objects:
        f, g = d.p1.ob[o], d.p2.ob[o]
        r = d.comp.ob[o]
        if d.source.ob[r] != d.source.ob[g] or d.target.ob[r] != d.target.ob[f]:
            w = ("composite", o)
            break
    rep.add("composite source/target", w)
    w = None
    for cat, p1, p2, comp, index in (("objects", d.p1.ob, d.p2.ob, d.comp.ob, d.pair),
                                     ("morphisms", d.p1.mor, d.p2.mor, d.comp.mor, d.pair_mor)):
        for o in (d.pairs.objects if cat == "objects" else d.pairs.morphisms):
            f, g = p1[o], p2[o]
            fg = comp[o]
            for o2 in (d.pairs.objects if cat == "objects" else d.pairs.morphisms):
                if p1[o2] != g:
                    continue
                h = p2[o2]
                left = index(fg, h)
                gh = comp[o2]
                right = index(f, gh)
                if left is None or right is None:
                    continue
                if comp[left] != comp[right]:
                    w = ("associativity", cat, f, g, h)
                    break
            if w:
                break
        if w:
            break
    rep.add("associativity", w)
    w = None
    for f in d.d1.objects:
        a = d.hcomp(d.unit.ob[d.target.ob[f]], f)
        b = d.hcomp(f, d.unit.ob[d.source.ob[f]])
        if a != f or b != f:
            w = ("unit law", f)
            break
    if w is None:
        for u in d.d1.morphisms:
            a = d.hcomp_mor(d.unit.mor[d.target.mor[u]], u)
            b = d.hcomp_mor(u, d.unit.mor[d.source.mor[u]])
            if a != u or b != u:
                w = ("unit law on morphism", u)
                break
    rep.add("unitality", w)
    return rep


def is_target_left_fibrant(d: DoubleCategory) -> Report:
    from .fincat import left_fibration_witness
    rep = Report(f"target left fibrancy of {d.name}")
    rep.add("target is a left fibration", left_fibration_witness(d.target))
    rep.add("composition is an isofibration", isofibration_witness(d.comp))
    return rep


def to_double(m: FMulticategory, bound: int | None = None) -> DoubleCategory:
    """F_* m truncated: horizontal morphisms are sequences (g_1..g_k) with k and
    the total arity at most the bound."""
    from .completion import fc_mor_id, seq_id
    L = m.bound if bound is None else bound
    v0 = FCategoryView(m.m0, L)
    d0 = v0.materialize()
    seqs = [x for x in FCategoryView(m.m1, L).objects() if sum(m.arity(g) for g in x) <= L]
    d1 = FCategoryView(m.m1, L).materialize(objects=seqs)
    s_ob, t_ob = {}, {}
    for o, x in d1.meta["seq"].items():
        s_ob[o] = seq_id(_concat(m.src_ob[g] for g in x))
        t_ob[o] = seq_id(tuple(m.t(g) for g in x))
    s_mor, t_mor = {}, {}
    for mid, (x, y, phi) in d1.meta["mor"].items():
        sx = _concat(m.src_ob[g] for g in x)
        sy = _concat(m.src_ob[g] for g in y)
        s_mor[mid] = fc_mor_id(sx, sy, mu_on_morphism([m.src_ob[g] for g in x], [m.src_ob[g] for g in y],
                                                      phi.index_map, [m.src_mor[c] for c in phi.components]))
        tx, ty = tuple(m.t(g) for g in x), tuple(m.t(g) for g in y)
        t_mor[mid] = fc_mor_id(tx, ty, FCMor(phi.index_map, tuple(m.t_mor(c) for c in phi.components)))
    source = Functor(d1, d0, s_ob, s_mor, check=False)
    target = Functor(d1, d0, t_ob, t_mor, check=False)
    u_ob = {o: seq_id(tuple(m.one(a) for a in x)) for o, x in d0.meta["seq"].items()}
    u_mor = {}
    for mid, (x, y, phi) in d0.meta["mor"].items():
        u_mor[mid] = fc_mor_id(tuple(m.one(a) for a in x), tuple(m.one(a) for a in y),
                               FCMor(phi.index_map, tuple(m.one_mor(c) for c in phi.components)))
    unit = Functor(d0, d1, u_ob, u_mor, check=False)
    seq_of = d1.meta["seq"]

    def blocks(fs, hs):
        out, i = [], 0
        for f in fs:
            out.append(tuple(hs[i:i + m.arity(f)]))
            i += m.arity(f)
        return out

    def comp_ob(fo, go):
        fs, hs = seq_of[fo], seq_of[go]
        r = tuple(m.compose(f, b) for f, b in zip(fs, blocks(fs, hs)))
        o = seq_id(r)
        return o if o in seq_of else None

    def comp_mor(u, v):
        fx, fy, phi = d1.meta["mor"][u]
        hx, hy, psi = d1.meta["mor"][v]
        bx, by = blocks(fx, hx), blocks(fy, hy)
        # components of psi grouped by the outer block they start in
        comps, k = [], 0
        for i, f in enumerate(fx):
            comps.append(tuple(psi.components[k:k + m.arity(f)]))
            k += m.arity(f)
        rs = tuple(m.compose_mor(phi.components[i], comps[i], by[phi.index_map[i]]) for i in range(len(fx)))
        src = tuple(m.compose(f, b) for f, b in zip(fx, bx))
        tgt = tuple(m.compose(f, b) for f, b in zip(fy, by))
        return fc_mor_id(src, tgt, FCMor(phi.index_map, rs))

    return double_from_data(d0, d1, source, target, unit, comp_ob, comp_mor, name=f"F_*({m.name})")


def double_functor_of(phi: MultiFunctor, dd: DoubleCategory, de: DoubleCategory) -> tuple[Functor, Functor]:
    """The pair of functors F_*(phi) on the truncated double categories."""
    from .completion import fc_mor_id, seq_id
    p0, p1 = phi.phi0, phi.phi1
    f0_ob = {o: seq_id(tuple(p0.ob[a] for a in x)) for o, x in dd.d0.meta["seq"].items()}
    f0_mor = {mid: fc_mor_id(tuple(p0.ob[a] for a in x), tuple(p0.ob[a] for a in y),
                             FCMor(m.index_map, tuple(p0.mor[c] for c in m.components)))
              for mid, (x, y, m) in dd.d0.meta["mor"].items()}
    f1_ob = {o: seq_id(tuple(p1.ob[a] for a in x)) for o, x in dd.d1.meta["seq"].items()}
    f1_mor = {mid: fc_mor_id(tuple(p1.ob[a] for a in x), tuple(p1.ob[a] for a in y),
                             FCMor(m.index_map, tuple(p1.mor[c] for c in m.components)))
              for mid, (x, y, m) in dd.d1.meta["mor"].items()}
    return (Functor(dd.d0, de.d0, f0_ob, f0_mor, check=False),
            Functor(dd.d1, de.d1, f1_ob, f1_mor, check=False))


# -- lax functors into (FinSet, x)

class LaxFunctor:
    """A functor F : d1 -> FinSet with laxator alpha and unitor eta.

    alpha[pair object] maps (x, y) in F(f) x F(g) to F(f . g); eta[X] is an
    element of F(1_X).
    """

    def __init__(self, d: DoubleCategory, functor, alpha: dict[str, dict], eta: dict[str, Any]):
        self.d, self.functor, self.alpha, self.eta = d, functor, alpha, eta


def check_lax_functor(lf: LaxFunctor) -> Report:
    d, F, alpha, eta = lf.d, lf.functor, lf.alpha, lf.eta
    rep = Report("lax functor")
    w = None
    try:
        F.validate()
        for o in d.pairs.objects:
            f, g = d.p1.ob[o], d.p2.ob[o]
            fg = d.comp.ob[o]
            for x in F.sets[f]:
                for y in F.sets[g]:
                    if alpha[o][x, y] not in F.sets[fg]:
                        raise CategoryError(f"laxator at {o} leaves F({fg})")
        for X in d.d0.objects:
            if eta[X] not in F.sets[d.unit.ob[X]]:
                raise CategoryError(f"unitor at {X} is not in F(1_{X})")
    except (CategoryError, KeyError) as e:
        w = str(e)
    rep.add("well-formed", w)
    if w is not None:
        return rep
    w = None
    for u in d.pairs.morphisms:
        a, b = d.pairs.src[u], d.pairs.tgt[u]
        fu, gu = d.p1.mor[u], d.p2.mor[u]
        hu = d.comp.mor[u]
        for x in F.sets[d.p1.ob[a]]:
            for y in F.sets[d.p2.ob[a]]:
                if F.maps[hu][alpha[a][x, y]] != alpha[b][F.maps[fu][x], F.maps[gu][y]]:
                    w = ("laxator naturality", u, x, y)
                    break
            if w:
                break
        if w:
            break
    if w is None:
        for v in d.d0.morphisms:
            if F.maps[d.unit.mor[v]][eta[d.d0.src[v]]] != eta[d.d0.tgt[v]]:
                w = ("unitor naturality", v)
                break
    rep.add("naturality", w)
    w = None
    for o in d.pairs.objects:
        f1, f2 = d.p1.ob[o], d.p2.ob[o]
        f12 = d.comp.ob[o]
        for o2 in d.pairs.objects:
            if d.p1.ob[o2] != f2:
                continue
            f3 = d.p2.ob[o2]
            left, right = d.pair(f12, f3), d.pair(f1, d.comp.ob[o2])
            if left is None or right is None:
                continue
            for x1 in F.sets[f1]:
                for x2 in F.sets[f2]:
                    for x3 in F.sets[f3]:
                        if alpha[left][alpha[o][x1, x2], x3] != alpha[right][x1, alpha[o2][x2, x3]]:
                            w = ("hexagon", f1, f2, f3, x1, x2, x3)
                            break
                    if w:
                        break
                if w:
                    break
            if w:
                break
        if w:
            break
    rep.add("associativity", w)
    w = None
    for f in d.d1.objects:
        lo = d.pair(d.unit.ob[d.target.ob[f]], f)
        ro = d.pair(f, d.unit.ob[d.source.ob[f]])
        for x in F.sets[f]:
            if lo is not None and alpha[lo][eta[d.target.ob[f]], x] != x:
                w = ("left unit", f, x)
            if ro is not None and alpha[ro][x, eta[d.source.ob[f]]] != x:
                w = ("right unit", f, x)
    rep.add("unitality", w)
    return rep


def check_vertical_transformation(lf: LaxFunctor, lg: LaxFunctor, theta: dict[str, dict]) -> Report:
    d = lf.d
    F, G = lf.functor, lg.functor
    rep = Report("vertical transformation")
    from .fincat import is_natural
    w = None
    try:
        if not is_natural(F, G, theta):
            w = "not natural"
    except KeyError as e:
        w = f"missing component {e}"
    rep.add("naturality", w)
    if w is not None:
        return rep
    w = None
    for o in d.pairs.objects:
        f, g = d.p1.ob[o], d.p2.ob[o]
        fg = d.comp.ob[o]
        for x in F.sets[f]:
            for y in F.sets[g]:
                if theta[fg][lf.alpha[o][x, y]] != lg.alpha[o][theta[f][x], theta[g][y]]:
                    w = ("laxator square", o, x, y)
    rep.add("laxator compatibility", w)
    w = None
    for X in d.d0.objects:
        if theta[d.unit.ob[X]][lf.eta[X]] != lg.eta[X]:
            w = ("unitor triangle", X)
    rep.add("unitor compatibility", w)
    return rep
