"""The free finite-coproduct completion FC, queried through an arity-bounded view.

An object of FC is a tuple of objects of C.  A morphism X -> Y is an index map
alpha : len(X) -> len(Y) together with components X_i -> Y_alpha(i).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

from .fincat import FinCategory, Functor, SetFunctor, opposite, sorted_elems


class ArityBoundExceeded(ValueError):
    pass


@dataclass(frozen=True)
class FCMor:
    index_map: tuple[int, ...]
    components: tuple[str, ...]

    def to_json(self) -> dict:
        return {"index_map": list(self.index_map), "components": list(self.components)}

    @classmethod
    def from_json(cls, doc: dict) -> "FCMor":
        return cls(tuple(int(i) for i in doc["index_map"]), tuple(str(c) for c in doc["components"]))


def seq_id(x: Sequence[str]) -> str:
    return "[" + ",".join(x) + "]"


def fc_mor_id(x: Sequence[str], y: Sequence[str], m: FCMor) -> str:
    return (seq_id(x) + "->" + seq_id(y) + ":" + ",".join(map(str, m.index_map))
            + "|" + ",".join(m.components))


def fc_compose(c: FinCategory, g: FCMor, f: FCMor) -> FCMor:
    """g after f."""
    return FCMor(tuple(g.index_map[a] for a in f.index_map),
                 tuple(c.table[g.components[a], fi] for a, fi in zip(f.index_map, f.components)))


def fc_identity(c: FinCategory, x: Sequence[str]) -> FCMor:
    return FCMor(tuple(range(len(x))), tuple(c.ident[xi] for xi in x))


def fc_is_morphism(c: FinCategory, x: Sequence[str], y: Sequence[str], m: FCMor) -> bool:
    if len(m.index_map) != len(x) or len(m.components) != len(x):
        return False
    for i, (a, comp) in enumerate(zip(m.index_map, m.components)):
        if not 0 <= a < len(y) or comp not in c.src:
            return False
        if c.src[comp] != x[i] or c.tgt[comp] != y[a]:
            return False
    return True


class FCategoryView:
    """Hom and enumeration queries on FC restricted to sequences of length <= bound."""

    def __init__(self, base: FinCategory, arity_bound: int = 4):
        if arity_bound < 0:
            raise ValueError("arity bound must be non-negative")
        self.base = base
        self.bound = arity_bound

    def _guard(self, *xs: Sequence[str]) -> None:
        for x in xs:
            if len(x) > self.bound:
                raise ArityBoundExceeded(f"sequence of length {len(x)} exceeds arity bound {self.bound}")
            for xi in x:
                if xi not in self.base.ident:
                    raise ValueError(f"{xi} is not an object of the base category")

    def objects(self, max_len: int | None = None) -> list[tuple[str, ...]]:
        n = self.bound if max_len is None else min(max_len, self.bound)
        out = []
        for k in range(n + 1):
            out.extend(itertools.product(self.base.objects, repeat=k))
        return out

    def hom(self, x: Sequence[str], y: Sequence[str]) -> list[FCMor]:
        self._guard(x, y)
        c = self.base
        out = []
        for alpha in itertools.product(range(len(y)), repeat=len(x)):
            choices = [c.hom(x[i], y[a]) for i, a in enumerate(alpha)]
            for comps in itertools.product(*choices):
                out.append(FCMor(tuple(alpha), tuple(comps)))
        return out

    def compose(self, g: FCMor, f: FCMor) -> FCMor:
        return fc_compose(self.base, g, f)

    def identity(self, x: Sequence[str]) -> FCMor:
        self._guard(x)
        return fc_identity(self.base, x)

    def materialize(self, max_len: int | None = None,
                    objects: Sequence[Sequence[str]] | None = None) -> FinCategory:
        """The full subcategory on sequences of length <= max_len (or on the
        given sequences) as a FinCategory.

        meta["seq"] maps object ids to tuples, meta["mor"] maps morphism ids to
        (source, target, FCMor).
        """
        c = self.base
        obs = self.objects(max_len) if objects is None else [tuple(x) for x in objects]
        ms, data = {}, {}
        homs: dict[tuple, list[str]] = {}
        for x in obs:
            for y in obs:
                ids = []
                for m in self.hom(x, y):
                    mid = fc_mor_id(x, y, m)
                    ms[mid] = (seq_id(x), seq_id(y))
                    data[mid] = (x, y, m)
                    ids.append(mid)
                homs[x, y] = ids
        # fc_compose inlined, with composites found by key rather than by id string
        by_key = {(x, y, m.index_map, m.components): mid for mid, (x, y, m) in data.items()}
        parts = {mid: (m.index_map, m.components) for mid, (_, _, m) in data.items()}
        ctable = c.table
        table = {}
        for fid, (x, y, f) in data.items():
            pairs = tuple(zip(f.index_map, f.components))
            for z in obs:
                for gid in homs[y, z]:
                    ga, gc = parts[gid]
                    table[gid, fid] = by_key[x, z, tuple(ga[a] for a, _ in pairs),
                                             tuple(ctable[gc[a], fi] for a, fi in pairs)]
        ident = {seq_id(x): fc_mor_id(x, x, fc_identity(c, x)) for x in obs}
        cat = FinCategory([seq_id(x) for x in obs], ms, ident, table,
                          name=f"F({c.name})", check=False)
        cat.meta["seq"] = {seq_id(x): tuple(x) for x in obs}
        cat.meta["mor"] = data
        return cat


# -- monad structure

def fc_hom(view: "FCategoryView", x: Sequence[str], y: Sequence[str]) -> list[FCMor]:
    return view.hom(x, y)


def mu_flatten(view: FCategoryView, nested: Sequence[Sequence[str]]) -> tuple[str, ...]:
    flat = tuple(x for block in nested for x in block)
    if len(flat) > view.bound:
        raise ArityBoundExceeded(f"flattened length {len(flat)} exceeds arity bound {view.bound}")
    return flat


def mu_on_morphism(src: Sequence[Sequence[str]], tgt: Sequence[Sequence[str]],
                   alpha: Sequence[int], comps: Sequence[FCMor]) -> FCMor:
    """Flatten a morphism of FFC given by alpha and components comps[i] : src[i] -> tgt[alpha[i]]."""
    offsets, acc = [], 0
    for block in tgt:
        offsets.append(acc)
        acc += len(block)
    idx, cs = [], []
    for i, phi in enumerate(comps):
        for r, a in enumerate(phi.index_map):
            idx.append(offsets[alpha[i]] + a)
            cs.append(phi.components[r])
    return FCMor(tuple(idx), tuple(cs))


def eta(x: str) -> tuple[str]:
    return (x,)


def eta_on_morphism(m: str) -> FCMor:
    return FCMor((0,), (m,))


# -- functoriality

class FFunctor:
    """F applied to a functor g : C -> D, acting entrywise."""

    def __init__(self, g: Functor, bound: int = 4):
        self.g = g
        self.bound = bound

    def ob(self, x: Sequence[str]) -> tuple[str, ...]:
        return tuple(self.g.ob[xi] for xi in x)

    def mor(self, m: FCMor) -> FCMor:
        return FCMor(m.index_map, tuple(self.g.mor[c] for c in m.components))

    def materialize(self, max_len: int | None = None) -> Functor:
        n = self.bound if max_len is None else max_len
        dom = FCategoryView(self.g.dom, n).materialize()
        cod = FCategoryView(self.g.cod, n).materialize()
        ob = {o: seq_id(self.ob(x)) for o, x in dom.meta["seq"].items()}
        mor = {}
        for mid, (x, y, m) in dom.meta["mor"].items():
            mor[mid] = fc_mor_id(self.ob(x), self.ob(y), self.mor(m))
        return Functor(dom, cod, ob, mor, check=False)


def f_on_functor(g: Functor, bound: int = 4) -> FFunctor:
    return FFunctor(g, bound)


def extend_product_preserving(f: SetFunctor, bound: int = 4) -> SetFunctor:
    """For a presheaf f on C (a SetFunctor on C^op), the presheaf on FC with
    value prod_i f(X_i) on (X_1, ..., X_n), as a SetFunctor on (FC)^op."""
    c = opposite(f.dom)
    fc = FCategoryView(c, bound).materialize()
    sets = {o: sorted_elems(itertools.product(*(f.sets[xi] for xi in x)))
            for o, x in fc.meta["seq"].items()}
    maps = {}
    for mid, (x, y, m) in fc.meta["mor"].items():
        maps[mid] = {ys: tuple(f.maps[m.components[i]][ys[a]] for i, a in enumerate(m.index_map))
                     for ys in sets[seq_id(y)]}
    return SetFunctor(opposite(fc), sets, maps, check=False)


def tilde_value(f: SetFunctor, x: Sequence[str]) -> list[tuple]:
    """Value of the product-preserving extension on one sequence, without materializing FC."""
    return list(itertools.product(*(f.sets[xi] for xi in x)))
