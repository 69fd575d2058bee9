"""Collections over an F-multicategory and the composition product.

A collection is a presheaf on the multimorphism category m1, stored as a
SetFunctor on opposite(m1).  The composition product S o T is the pointwise
left Kan extension of (s, t_1..t_n) |-> S(f) x prod T(g_i) along the
composition functor, so its elements are colimit classes (p, w, x) with p a
composable tuple, w : f -> comp(p) in m1 and x in S(f) x prod T(g_i).
"""
from __future__ import annotations

import itertools
from typing import Any, Iterable, Mapping

from ..fincat import (CategoryError, FinCategory, Functor, KanExtension, SetFunctor, ekey,
                      left_kan_extension, natural_transformations, opposite, sorted_elems, terminal)
from ..fmulti import DoubleCategory, FMulticategory, double_from_data, is_target_left_fibrant


class NonFiniteComposite(ValueError):
    """The composite would need multimorphisms beyond the arity bound."""


# -- cached opposites

def _cached(m: Any, key: str, build):
    cache = m.__dict__.setdefault("_op_cache", {})
    if key not in cache:
        cache[key] = build()
    return cache[key]


def m1_op(m: FMulticategory) -> FinCategory:
    return _cached(m, "m1", lambda: opposite(m.m1))


def m0_op(m: FMulticategory) -> FinCategory:
    return _cached(m, "m0", lambda: opposite(m.m0))


def p_op(m: FMulticategory) -> FinCategory:
    return _cached(m, "p", lambda: opposite(m.composable))


def comp_op(m: FMulticategory) -> Functor:
    return _cached(m, "comp", lambda: Functor(p_op(m), m1_op(m), m.comp.ob, m.comp.mor, check=False))


def unit_op(m: FMulticategory) -> Functor:
    return _cached(m, "unit", lambda: Functor(m0_op(m), m1_op(m), m.unit.ob, m.unit.mor, check=False))


# -- collections

class Collection:
    def __init__(self, m: FMulticategory, functor: SetFunctor):
        if functor.dom is not m1_op(m) and functor.dom != m1_op(m):
            raise CategoryError("a collection is a SetFunctor on the opposite multimorphism category")
        self.m = m
        self.functor = functor

    def __call__(self, f: str) -> tuple:
        return self.functor.sets[f]

    @property
    def sets(self) -> dict:
        return self.functor.sets

    def act(self, u: str, e: Any) -> Any:
        """Action of u : f -> f2 in m1, sending S(f2) to S(f)."""
        return self.functor.maps[u][e]

    def sizes(self) -> dict[str, int]:
        return self.functor.sizes()

    def support(self) -> list[str]:
        return [f for f in self.m.m1.objects if self.functor.sets[f]]

    def validate(self) -> None:
        self.functor.validate()

    def reaches_beyond_bound(self) -> bool:
        """Whether the collection may be nonzero beyond the arity bound.  For given
        data this is read off the top arity."""
        return any(self.functor.sets[f] for f in self.m.m1.objects if self.m.arity(f) == self.m.bound)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Collection) and self.m is other.m and self.functor == other.functor

    def __repr__(self) -> str:
        nz = {f: n for f, n in self.sizes().items() if n}
        return f"Collection({self.m.name}: {nz})"

    def to_json(self) -> dict:
        doc = self.functor.to_json()
        return {"multicat": self.m.name, "values": doc["values"], "action": doc["action"]}


def collection(m: FMulticategory, values: Mapping[str, Iterable], action: Mapping[str, Mapping] | None = None,
               check: bool = True) -> Collection:
    """Build a collection from its values; a missing action of u : f -> f2 is
    taken to be the identity, which requires S(f) = S(f2)."""
    c = m1_op(m)
    action = action or {}
    sets = {f: sorted_elems(values.get(f, ())) for f in c.objects}
    maps = {}
    for u in c.morphisms:
        if u in action:
            maps[u] = dict(action[u])
        elif sets[c.src[u]] == sets[c.tgt[u]]:
            maps[u] = {e: e for e in sets[c.src[u]]}
        else:
            raise CategoryError(f"no action given for {u}")
    return Collection(m, SetFunctor(c, sets, maps, check=check))


def collection_from_json(m: FMulticategory, doc: Mapping) -> Collection:
    action = {u: dict(v) for u, v in doc.get("action", {}).items()}
    return collection(m, doc["values"], action)


def empty_collection(m: FMulticategory) -> Collection:
    return collection(m, {}, check=False)


def terminal_collection(m: FMulticategory) -> Collection:
    return collection(m, {f: ("*",) for f in m.m1.objects}, check=False)


def representable_collection(m: FMulticategory, g: str) -> Collection:
    """hom(-, g) on m1."""
    c = m.m1
    sets = {f: c.hom(f, g) for f in c.objects}
    maps = {u: {h: c.table[h, u] for h in sets[c.tgt[u]]} for u in c.morphisms}
    return Collection(m, SetFunctor(m1_op(m), sets, maps, check=False))


def sum_collections(a: Collection, b: Collection, tags: tuple[str, str] = ("0", "1")) -> Collection:
    """Tagged disjoint union; elements are (tag, e)."""
    if a.m is not b.m:
        raise CategoryError("collections over different multicategories")
    c = m1_op(a.m)
    ta, tb = tags
    sets = {f: [(ta, e) for e in a(f)] + [(tb, e) for e in b(f)] for f in c.objects}
    maps = {}
    for u in c.morphisms:
        mu = {(ta, e): (ta, v) for e, v in a.functor.maps[u].items()}
        mu.update({(tb, e): (tb, v) for e, v in b.functor.maps[u].items()})
        maps[u] = mu
    return Collection(a.m, SetFunctor(c, sets, maps, check=False))


def collection_morphisms(s: Collection, t: Collection) -> list[dict[str, dict]]:
    if s.m is not t.m:
        raise CategoryError("collections over different multicategories")
    return natural_transformations(s.functor, t.functor)


def freeze(nt: Mapping[str, Mapping]) -> tuple:
    """A hashable form of a natural transformation."""
    return tuple((x, tuple(sorted(comp.items(), key=ekey))) for x, comp in sorted(nt.items()))


def thaw(frozen: tuple) -> dict[str, dict]:
    return {x: dict(items) for x, items in frozen}


# -- unit

class UnitCollection(Collection):
    """J = Lan of the point along the unit functor; elements (X, m, '*') with m : f -> 1_X."""

    def __init__(self, m: FMulticategory, kan: KanExtension):
        super().__init__(m, kan.functor)
        self.kan = kan

    def cls(self, x: str, w: str) -> tuple:
        return self.kan.colims[self.m.m1.src[w]].cls((x, w, "*"))


def unit_collection(m: FMulticategory) -> UnitCollection:
    point = SetFunctor(m0_op(m), {x: ("*",) for x in m.m0.objects},
                       {v: {"*": "*"} for v in m.m0.morphisms}, check=False)
    return UnitCollection(m, left_kan_extension(point, unit_op(m)))


# -- composition product

class Composite(Collection):
    """S o T with the colimit data needed to name its elements."""

    def __init__(self, s: Collection, t: Collection, x: SetFunctor, kan: KanExtension, s_supported: bool = False):
        super().__init__(s.m, kan.functor)
        self.s, self.t, self.x, self.kan = s, t, x, kan
        self.s_supported = s_supported

    def reaches_beyond_bound(self) -> bool:
        """Whether some S(k) x T(n_1) x .. x T(n_k) has n_1 + .. + n_k above the bound."""
        m, s, t = self.m, self.s, self.t
        t_arities = [m.arity(g) for g in t.support()]
        if not t_arities:
            return False
        if not self.s_supported and s.reaches_beyond_bound():
            return True
        top = max(t_arities)
        for f in s.support():
            k = m.arity(f)
            if k and (t.reaches_beyond_bound() or k * top > m.bound):
                return True
        return False

    def cls(self, p: str, w: str, x: tuple) -> tuple:
        """Class of (p, w, x) for w : f -> comp(p) in m1."""
        return self.kan.colims[self.m.m1.src[w]].cls((p, w, x))

    def inj(self, p: str, x: tuple) -> tuple:
        """Coprojection of x in X(p) into (S o T)(comp p)."""
        f = self.m.comp.ob[p]
        return self.cls(p, self.m.m1.ident[f], x)

    def members(self, f: str, c: tuple) -> tuple:
        return self.kan.colims[f].classes[c]


def _tuple_functor(m: FMulticategory, s: Collection, t: Collection) -> SetFunctor:
    p = m.composable
    obdata, mdata = p.meta["ob"], p.meta["mor"]
    sets = {}
    for o, (f, gs) in obdata.items():
        sets[o] = [(a, bs) for a in s(f) for bs in itertools.product(*(t(g) for g in gs))]
    maps = {}
    for mid, (u, vs, o, o2) in mdata.items():
        alpha = m.src_mor[u].index_map
        su, tv = s.functor.maps[u], [t.functor.maps[v] for v in vs]
        maps[mid] = {(a, bs): (su[a], tuple(tv[i][bs[j]] for i, j in enumerate(alpha)))
                     for a, bs in sets[o2]}
    return SetFunctor(p_op(m), sets, maps, check=False)


def composite_is_exact(s: Collection, t: Collection) -> bool:
    """False when S may be nonzero beyond the arity bound and T has nullary
    elements, in which case contributions from beyond the bound cannot be ruled out."""
    m = s.m
    nullary = any(t(g) for g in m.m1.objects if m.arity(g) == 0)
    return not (nullary and s.reaches_beyond_bound())


def compose_collections(s: Collection, t: Collection, assume_supported: bool = False) -> Composite:
    if s.m is not t.m:
        raise CategoryError("collections over different multicategories")
    if not assume_supported and not composite_is_exact(s, t):
        raise NonFiniteComposite(
            f"S may be nonzero beyond the arity bound {s.m.bound} and T has nullary elements; "
            "pass assume_supported=True if S vanishes beyond the bound")
    x = _tuple_functor(s.m, s, t)
    return Composite(s, t, x, left_kan_extension(x, comp_op(s.m)), s_supported=assume_supported)


def compose_maps(alpha: Mapping[str, Mapping], beta: Mapping[str, Mapping], src: Composite,
                 tgt: Composite) -> dict[str, dict]:
    """alpha o beta : S o T -> S' o T' on class representatives."""
    m = src.m
    out = {}
    for f in m.m1.objects:
        comp = {}
        for (p, w, (a, bs)) in src.sets[f]:
            g0 = m.composable.meta["ob"][p][0]
            gs = m.composable.meta["ob"][p][1]
            comp[(p, w, (a, bs))] = tgt.cls(p, w, (alpha[g0][a], tuple(beta[g][b] for g, b in zip(gs, bs))))
        out[f] = comp
    return out


# -- internal hom

class InternalHom(Collection):
    """[T, U](g) = Nat(y_g o T, U); elements are frozen natural transformations."""

    def __init__(self, t: Collection, u: Collection, functor: SetFunctor, composites: dict[str, Composite]):
        super().__init__(t.m, functor)
        self.t, self.u, self.composites = t, u, composites


def internal_hom(t: Collection, u: Collection) -> InternalHom:
    if t.m is not u.m:
        raise CategoryError("collections over different multicategories")
    m = t.m
    c = m.m1
    comps = {g: compose_collections(representable_collection(m, g), t, assume_supported=True)
             for g in c.objects}
    sets = {g: [freeze(nt) for nt in natural_transformations(comps[g].functor, u.functor)]
            for g in c.objects}
    maps = {}
    for w in c.morphisms:
        g, g2 = c.src[w], c.tgt[w]
        yw = {}
        for f in c.objects:
            yw[f] = {(p, v, (a, bs)): comps[g2].cls(p, v, (c.table[w, a], bs))
                     for (p, v, (a, bs)) in comps[g].sets[f]}
        act = {}
        for e in sets[g2]:
            nt = thaw(e)
            act[e] = freeze({f: {k: nt[f][yw[f][k]] for k in comps[g].sets[f]} for f in c.objects})
        maps[w] = act
    return InternalHom(t, u, SetFunctor(m1_op(m), sets, maps, check=False), comps)


# -- convolution on a double category

def conv_double_kan(d: DoubleCategory, f: SetFunctor, g: SetFunctor, check: bool = True) -> KanExtension:
    """Lan along horizontal composition of (a, b) |-> f(a) x g(b)."""
    if check:
        rep = is_target_left_fibrant(d)
        if not rep.ok:
            raise CategoryError(f"double category is not target left fibrant: {rep.failures()[0].witness}")
    pr = d.pairs
    sets = {o: list(itertools.product(f.sets[d.p1.ob[o]], g.sets[d.p2.ob[o]])) for o in pr.objects}
    maps = {u: {(a, b): (f.maps[d.p1.mor[u]][a], g.maps[d.p2.mor[u]][b]) for a, b in sets[pr.src[u]]}
            for u in pr.morphisms}
    return left_kan_extension(SetFunctor(pr, sets, maps, check=False), d.comp)


def conv_double(d: DoubleCategory, f: SetFunctor, g: SetFunctor, check: bool = True) -> SetFunctor:
    return conv_double_kan(d, f, g, check).functor


def conv_unit(d: DoubleCategory) -> SetFunctor:
    point = SetFunctor(d.d0, {x: ("*",) for x in d.d0.objects},
                       {v: {"*": "*"} for v in d.d0.morphisms}, check=False)
    return left_kan_extension(point, d.unit).functor


def monoid_double(elements: list[str], mult, unit: str) -> DoubleCategory:
    """A monoid as a double category with one object and only identity cells.
    mult may return None to truncate."""
    d0 = terminal()
    d1 = FinCategory(elements, {f"id_{e}": (e, e) for e in elements}, {e: f"id_{e}" for e in elements},
                     {(f"id_{e}", f"id_{e}"): f"id_{e}" for e in elements}, name="monoid", check=False)
    const = Functor(d1, d0, {e: "*" for e in elements}, {f"id_{e}": "id_*" for e in elements}, check=False)
    u = Functor(d0, d1, {"*": unit}, {"id_*": f"id_{unit}"}, check=False)

    def comp_ob(a, b):
        return mult(a, b)

    def comp_mor(ua, ub):
        r = mult(ua[3:], ub[3:])
        return None if r is None else f"id_{r}"

    return double_from_data(d0, d1, const, const, u, comp_ob, comp_mor, name="monoid")


def product_extension(s: Collection, d1: FinCategory) -> SetFunctor:
    """The product-preserving extension of s to the sequences of d1 (a truncation
    of F(m1)^op carrying meta["seq"] and meta["mor"])."""
    seq, mor = d1.meta["seq"], d1.meta["mor"]
    sets = {o: list(itertools.product(*(s(g) for g in x))) for o, x in seq.items()}
    maps = {}
    for mid, (x, y, phi) in mor.items():
        maps[mid] = {ys: tuple(s.act(phi.components[i], ys[a]) for i, a in enumerate(phi.index_map))
                     for ys in sets[_seq_key(y)]}
    return SetFunctor(d1, sets, maps, check=False)


def _seq_key(x) -> str:
    from ..completion import seq_id
    return seq_id(x)
