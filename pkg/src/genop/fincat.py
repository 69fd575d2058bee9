"""Finite categories, functors, set-valued functors and their (co)limits.

Objects and morphisms are identified by strings.  A category stores its
composition table as a dict keyed by ``(g, f)`` meaning "g after f".
"""
from __future__ import annotations

import itertools
from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import Any, Callable, Iterable, Mapping, Sequence

from networkx.utils import UnionFind


class CategoryError(ValueError):
    """Raised when data does not describe a category or functor."""


class CapExceeded(RuntimeError):
    """Raised when an input is larger than the configured search cap."""


@dataclass(frozen=True)
class Caps:
    objects: int = 8
    morphisms: int = 64


DEFAULT_CAPS = Caps()


def ekey(x: Any) -> str:
    # total order on heterogeneous elements, used for canonical representatives
    return repr(x)


def sorted_elems(xs: Iterable) -> tuple:
    return tuple(sorted(set(xs), key=ekey))


def pid(*parts: str) -> str:
    """Id of a composite object built from component ids."""
    return "(" + ",".join(parts) + ")"


class FinCategory:
    def __init__(self, objects: Sequence[str], morphisms: Mapping[str, tuple[str, str]],
                 identities: Mapping[str, str], compose: Mapping[tuple[str, str], str],
                 name: str = "", check: bool = True):
        self.objects = tuple(objects)
        self.src = {m: st[0] for m, st in morphisms.items()}
        self.tgt = {m: st[1] for m, st in morphisms.items()}
        self.morphisms = tuple(morphisms)
        self.ident = dict(identities)
        self.table = dict(compose)
        self.name = name
        self.meta: dict[str, Any] = {}
        self._hom: dict[tuple[str, str], list[str]] = defaultdict(list)
        self._into: dict[str, list[str]] = defaultdict(list)
        self._out: dict[str, list[str]] = defaultdict(list)
        for m in self.morphisms:
            self._hom[self.src[m], self.tgt[m]].append(m)
            self._into[self.tgt[m]].append(m)
            self._out[self.src[m]].append(m)
        self._inverse: dict[str, str | None] = {}
        if check:
            self.validate()

    # -- access
    def hom(self, x: str, y: str) -> list[str]:
        return self._hom.get((x, y), [])

    def into(self, y: str) -> list[str]:
        return self._into.get(y, [])

    def out(self, x: str) -> list[str]:
        return self._out.get(x, [])

    def comp(self, g: str, f: str) -> str:
        return self.table[g, f]

    def comp_many(self, *ms: str) -> str:
        """comp_many(h, g, f) = h after g after f."""
        r = ms[-1]
        for m in reversed(ms[:-1]):
            r = self.table[m, r]
        return r

    def identity(self, x: str) -> str:
        return self.ident[x]

    def is_identity(self, m: str) -> bool:
        return self.ident[self.src[m]] == m

    def inverse(self, m: str) -> str | None:
        if m not in self._inverse:
            a, b = self.src[m], self.tgt[m]
            inv = None
            for n in self.hom(b, a):
                if self.table[n, m] == self.ident[a] and self.table[m, n] == self.ident[b]:
                    inv = n
                    break
            self._inverse[m] = inv
        return self._inverse[m]

    def is_iso(self, m: str) -> bool:
        return self.inverse(m) is not None

    def is_groupoid(self) -> bool:
        return all(self.is_iso(m) for m in self.morphisms)

    def check_caps(self, caps: Caps = DEFAULT_CAPS) -> None:
        if len(self.objects) > caps.objects or len(self.morphisms) > caps.morphisms:
            raise CapExceeded(
                f"category {self.name or '?'} has {len(self.objects)} objects and "
                f"{len(self.morphisms)} morphisms; cap is {caps.objects}/{caps.morphisms}")

    # -- validation
    def validate(self) -> None:
        obs = set(self.objects)
        if len(obs) != len(self.objects):
            raise CategoryError("duplicate object id")
        if len(set(self.morphisms)) != len(self.morphisms):
            raise CategoryError("duplicate morphism id")
        for m in self.morphisms:
            if self.src[m] not in obs or self.tgt[m] not in obs:
                raise CategoryError(f"morphism {m} has an unknown endpoint")
        for x in self.objects:
            i = self.ident.get(x)
            if i is None or self.src.get(i) != x or self.tgt.get(i) != x:
                raise CategoryError(f"identity of {x} missing or not an endomorphism of {x}")
        for f in self.morphisms:
            for g in self.out(self.tgt[f]):
                h = self.table.get((g, f))
                if h is None:
                    raise CategoryError(f"compose({g}, {f}) undefined")
                if self.src.get(h) != self.src[f] or self.tgt.get(h) != self.tgt[g]:
                    raise CategoryError(f"compose({g}, {f}) = {h} has wrong endpoints")
        n_pairs = sum(len(self.out(self.tgt[f])) for f in self.morphisms)
        if n_pairs != len(self.table):
            raise CategoryError("composition table has entries for non-composable pairs")
        for f in self.morphisms:
            if self.table[self.ident[self.tgt[f]], f] != f:
                raise CategoryError(f"compose(id_{self.tgt[f]}, {f}) != {f}")
            if self.table[f, self.ident[self.src[f]]] != f:
                raise CategoryError(f"compose({f}, id_{self.src[f]}) != {f}")
        for f in self.morphisms:
            for g in self.out(self.tgt[f]):
                gf = self.table[g, f]
                for h in self.out(self.tgt[g]):
                    if self.table[h, gf] != self.table[self.table[h, g], f]:
                        raise CategoryError(
                            f"compose({h}, compose({g}, {f})) != compose(compose({h}, {g}), {f})")

    # -- misc
    def data(self) -> tuple:
        return (self.objects, tuple((m, self.src[m], self.tgt[m]) for m in self.morphisms),
                tuple(sorted(self.ident.items())), tuple(sorted(self.table.items())))

    def __eq__(self, other: object) -> bool:
        return self is other or (isinstance(other, FinCategory) and self.data() == other.data())

    def __hash__(self) -> int:
        return hash(self.data())

    def __repr__(self) -> str:
        return f"FinCategory({self.name or '?'}: {len(self.objects)} objects, {len(self.morphisms)} morphisms)"

    def to_json(self) -> dict:
        return {
            "objects": list(self.objects),
            "morphisms": [{"id": m, "src": self.src[m], "tgt": self.tgt[m]} for m in self.morphisms],
            "compose": [[g, f, h] for (g, f), h in sorted(self.table.items())],
            "identities": {x: self.ident[x] for x in self.objects},
        }

    @classmethod
    def from_json(cls, doc: Mapping, name: str = "") -> "FinCategory":
        try:
            objects = [str(x) for x in doc["objects"]]
            morphisms = {str(m["id"]): (str(m["src"]), str(m["tgt"])) for m in doc["morphisms"]}
            identities = {str(k): str(v) for k, v in doc["identities"].items()}
        except (KeyError, TypeError) as e:
            raise CategoryError(f"malformed category document: {e}") from e
        table = {}
        for x, i in identities.items():
            morphisms.setdefault(i, (x, x))
        for m in list(morphisms):
            s, t = morphisms[m]
            table[identities.get(t, "?"), m] = m
            table[m, identities.get(s, "?")] = m
        for row in doc.get("compose", []):
            g, f, h = (str(v) for v in row)
            table[g, f] = h
        return cls(objects, morphisms, identities, table, name=name)


# -- small builders

def discrete(names: Iterable[str]) -> FinCategory:
    names = list(names)
    ms = {f"id_{x}": (x, x) for x in names}
    return FinCategory(names, ms, {x: f"id_{x}" for x in names},
                       {(f"id_{x}", f"id_{x}"): f"id_{x}" for x in names}, name="discrete")


def terminal() -> FinCategory:
    return discrete(["*"])


def from_monoid(elements: Sequence[str], mult: Callable[[str, str], str], unit: str,
                obj: str = "*") -> FinCategory:
    """One-object category; compose(g, f) = mult(g, f)."""
    ms = {e: (obj, obj) for e in elements}
    table = {(g, f): mult(g, f) for g in elements for f in elements}
    return FinCategory([obj], ms, {obj: unit}, table, name="monoid")


def poset(elements: Sequence[str], le: Callable[[str, str], bool]) -> FinCategory:
    ms = {}
    for a in elements:
        for b in elements:
            if le(a, b):
                ms[f"{a}<={b}"] = (a, b)
    table = {}
    for f, (a, b) in ms.items():
        for g, (b2, c) in ms.items():
            if b2 == b:
                table[g, f] = f"{a}<={c}"
    return FinCategory(list(elements), ms, {a: f"{a}<={a}" for a in elements}, table, name="poset")


def arrow() -> FinCategory:
    """The walking arrow a -> b with morphism u."""
    ms = {"id_a": ("a", "a"), "id_b": ("b", "b"), "u": ("a", "b")}
    table = {("id_a", "id_a"): "id_a", ("id_b", "id_b"): "id_b",
             ("u", "id_a"): "u", ("id_b", "u"): "u"}
    return FinCategory(["a", "b"], ms, {"a": "id_a", "b": "id_b"}, table, name="arrow")


def walking_iso() -> FinCategory:
    ms = {"id_0": ("0", "0"), "id_1": ("1", "1"), "e": ("0", "1"), "e_inv": ("1", "0")}
    table = {("id_0", "id_0"): "id_0", ("id_1", "id_1"): "id_1",
             ("e", "id_0"): "e", ("id_1", "e"): "e", ("e_inv", "id_1"): "e_inv",
             ("id_0", "e_inv"): "e_inv", ("e_inv", "e"): "id_0", ("e", "e_inv"): "id_1"}
    return FinCategory(["0", "1"], ms, {"0": "id_0", "1": "id_1"}, table, name="iso")


def product(c: FinCategory, d: FinCategory) -> FinCategory:
    obs = [pid(x, y) for x in c.objects for y in d.objects]
    ms = {pid(f, g): (pid(c.src[f], d.src[g]), pid(c.tgt[f], d.tgt[g]))
          for f in c.morphisms for g in d.morphisms}
    table = {(pid(f2, g2), pid(f1, g1)): pid(c.table[f2, f1], d.table[g2, g1])
             for (f2, f1) in c.table for (g2, g1) in d.table}
    ident = {pid(x, y): pid(c.ident[x], d.ident[y]) for x in c.objects for y in d.objects}
    return FinCategory(obs, ms, ident, table, name="product", check=False)


def opposite(c: FinCategory) -> FinCategory:
    """Same ids, reversed arrows, transposed composition table."""
    ms = {m: (c.tgt[m], c.src[m]) for m in c.morphisms}
    table = {(f, g): h for (g, f), h in c.table.items()}
    op = FinCategory(c.objects, ms, c.ident, table, name=c.name + "^op", check=False)
    op.meta = dict(c.meta)
    return op


def full_subcategory(c: FinCategory, objects: Iterable[str]) -> FinCategory:
    keep = [x for x in c.objects if x in set(objects)]
    ks = set(keep)
    ms = {m: (c.src[m], c.tgt[m]) for m in c.morphisms if c.src[m] in ks and c.tgt[m] in ks}
    table = {(g, f): h for (g, f), h in c.table.items() if g in ms and f in ms}
    return FinCategory(keep, ms, {x: c.ident[x] for x in keep}, table, name=c.name, check=False)


# -- functors

class Functor:
    def __init__(self, dom: FinCategory, cod: FinCategory, ob: Mapping[str, str],
                 mor: Mapping[str, str], check: bool = True):
        self.dom, self.cod = dom, cod
        self.ob = dict(ob)
        self.mor = dict(mor)
        if check:
            self.validate()

    def validate(self) -> None:
        c, d = self.dom, self.cod
        for x in c.objects:
            if self.ob.get(x) not in d.ident:
                raise CategoryError(f"F({x}) is not an object of the codomain")
        for m in c.morphisms:
            fm = self.mor.get(m)
            if fm not in d.src:
                raise CategoryError(f"F({m}) is not a morphism of the codomain")
            if d.src[fm] != self.ob[c.src[m]] or d.tgt[fm] != self.ob[c.tgt[m]]:
                raise CategoryError(f"F({m}) : F(src {m}) -> F(tgt {m}) fails")
        for x in c.objects:
            if self.mor[c.ident[x]] != d.ident[self.ob[x]]:
                raise CategoryError(f"F(id_{x}) = id_F({x}) fails")
        for (g, f), h in c.table.items():
            if d.table[self.mor[g], self.mor[f]] != self.mor[h]:
                raise CategoryError(f"F(compose({g}, {f})) = compose(F({g}), F({f})) fails")

    def then(self, other: "Functor") -> "Functor":
        """other after self."""
        return Functor(self.dom, other.cod, {x: other.ob[y] for x, y in self.ob.items()},
                       {m: other.mor[n] for m, n in self.mor.items()}, check=False)

    def op(self) -> "Functor":
        return Functor(opposite(self.dom), opposite(self.cod), self.ob, self.mor, check=False)

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, Functor) and self.dom == other.dom and self.cod == other.cod
                and self.ob == other.ob and self.mor == other.mor)

    def __hash__(self) -> int:
        return hash((tuple(sorted(self.ob.items())), tuple(sorted(self.mor.items()))))


def identity_functor(c: FinCategory) -> Functor:
    return Functor(c, c, {x: x for x in c.objects}, {m: m for m in c.morphisms}, check=False)


def constant_functor(c: FinCategory, d: FinCategory, x: str) -> Functor:
    return Functor(c, d, {a: x for a in c.objects}, {m: d.ident[x] for m in c.morphisms})


class NatTransform:
    def __init__(self, source: Functor, target: Functor, components: Mapping[str, str],
                 check: bool = True):
        self.source, self.target = source, target
        self.components = dict(components)
        if check:
            self.validate()

    def validate(self) -> None:
        f, g = self.source, self.target
        d = f.cod
        for x in f.dom.objects:
            a = self.components.get(x)
            if a not in d.src or d.src[a] != f.ob[x] or d.tgt[a] != g.ob[x]:
                raise CategoryError(f"component at {x} is not F({x}) -> G({x})")
        for m in f.dom.morphisms:
            x, y = f.dom.src[m], f.dom.tgt[m]
            if d.table[self.components[y], f.mor[m]] != d.table[g.mor[m], self.components[x]]:
                raise CategoryError(f"naturality square at {m} does not commute")


# -- set-valued functors

class SetFunctor:
    """A covariant functor dom -> FinSet.  Presheaves live on opposite categories."""

    def __init__(self, dom: FinCategory, sets: Mapping[str, Iterable],
                 maps: Mapping[str, Mapping], check: bool = True):
        self.dom = dom
        self.sets = {x: sorted_elems(sets[x]) for x in dom.objects}
        self.maps = {m: dict(maps[m]) for m in dom.morphisms}
        if check:
            self.validate()

    def __call__(self, x: str) -> tuple:
        return self.sets[x]

    def act(self, m: str, e: Any) -> Any:
        return self.maps[m][e]

    def validate(self) -> None:
        c = self.dom
        for m in c.morphisms:
            a, b = self.sets[c.src[m]], set(self.sets[c.tgt[m]])
            fm = self.maps[m]
            if set(fm) != set(a):
                raise CategoryError(f"action of {m} is not defined on all of F({c.src[m]})")
            if not all(v in b for v in fm.values()):
                raise CategoryError(f"action of {m} does not land in F({c.tgt[m]})")
        for x in c.objects:
            if any(self.maps[c.ident[x]][e] != e for e in self.sets[x]):
                raise CategoryError(f"F(id_{x}) is not the identity")
        for (g, f), h in c.table.items():
            mg, mf, mh = self.maps[g], self.maps[f], self.maps[h]
            for e in self.sets[c.src[f]]:
                if mg[mf[e]] != mh[e]:
                    raise CategoryError(f"F(compose({g}, {f})) != F({g}) F({f}) at {e!r}")

    def sizes(self) -> dict[str, int]:
        return {x: len(v) for x, v in self.sets.items()}

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, SetFunctor) and self.dom == other.dom and self.sets == other.sets
                and self.maps == other.maps)

    def to_json(self) -> dict:
        return {"values": {x: [str(e) for e in self.sets[x]] for x in self.dom.objects},
                "action": {m: {str(k): str(v) for k, v in sorted(self.maps[m].items(), key=lambda kv: ekey(kv[0]))}
                           for m in self.dom.morphisms if not self.dom.is_identity(m)}}


def constant_set_functor(c: FinCategory, elems: Iterable = ("*",)) -> SetFunctor:
    elems = sorted_elems(elems)
    return SetFunctor(c, {x: elems for x in c.objects},
                      {m: {e: e for e in elems} for m in c.morphisms}, check=False)


def precompose(x: SetFunctor, g: Functor) -> SetFunctor:
    """x after g."""
    return SetFunctor(g.dom, {a: x.sets[g.ob[a]] for a in g.dom.objects},
                      {m: x.maps[g.mor[m]] for m in g.dom.morphisms}, check=False)


def representable_presheaf(c: FinCategory, x: str) -> SetFunctor:
    """hom(-, x) as a SetFunctor on c^op."""
    op = opposite(c)
    sets = {y: c.hom(y, x) for y in c.objects}
    maps = {m: {h: c.table[h, m] for h in c.hom(c.tgt[m], x)} for m in c.morphisms}
    return SetFunctor(op, sets, maps, check=False)


# -- pullbacks and comma categories

def pullback_category(f: Functor, g: Functor) -> tuple[FinCategory, Functor, Functor]:
    if f.cod != g.cod:
        raise CategoryError("pullback needs functors with a common codomain")
    a, b = f.dom, g.dom
    obs = [pid(x, y) for x in a.objects for y in b.objects if f.ob[x] == g.ob[y]]
    ms = {}
    for u in a.morphisms:
        for v in b.morphisms:
            if f.mor[u] == g.mor[v]:
                ms[pid(u, v)] = (pid(a.src[u], b.src[v]), pid(a.tgt[u], b.tgt[v]))
    table = {}
    pairs = {pid(u, v): (u, v) for u in a.morphisms for v in b.morphisms if pid(u, v) in ms}
    for m1, (u1, v1) in pairs.items():
        for m2, (u2, v2) in pairs.items():
            if a.tgt[u1] == a.src[u2] and b.tgt[v1] == b.src[v2]:
                table[m2, m1] = pid(a.table[u2, u1], b.table[v2, v1])
    ident = {pid(x, y): pid(a.ident[x], b.ident[y]) for x in a.objects for y in b.objects
             if f.ob[x] == g.ob[y]}
    p = FinCategory(obs, ms, ident, table, name="pullback", check=False)
    split_o = {pid(x, y): (x, y) for x in a.objects for y in b.objects if f.ob[x] == g.ob[y]}
    p1 = Functor(p, a, {o: xy[0] for o, xy in split_o.items()},
                 {m: uv[0] for m, uv in pairs.items()}, check=False)
    p2 = Functor(p, b, {o: xy[1] for o, xy in split_o.items()},
                 {m: uv[1] for m, uv in pairs.items()}, check=False)
    return p, p1, p2


def comma_category(f: Functor, x: str) -> tuple[FinCategory, Functor]:
    """The slice f_{/x}: objects (a, m: f(a) -> x)."""
    d = f.cod
    if x not in d.ident:
        raise CategoryError(f"{x} is not an object of the codomain")
    c = f.dom
    obs, split = [], {}
    for a in c.objects:
        for m in d.hom(f.ob[a], x):
            o = pid(a, m)
            obs.append(o)
            split[o] = (a, m)
    ms, mdata = {}, {}
    for k in c.morphisms:
        a, a2 = c.src[k], c.tgt[k]
        for m2 in d.hom(f.ob[a2], x):
            m = d.table[m2, f.mor[k]]
            mid = pid(k, m2)
            ms[mid] = (pid(a, m), pid(a2, m2))
            mdata[mid] = k
    table = {}
    for m1, (s1, t1) in ms.items():
        for m2 in [mm for mm in ms if ms[mm][0] == t1]:
            k = c.table[mdata[m2], mdata[m1]]
            table[m2, m1] = pid(k, split[ms[m2][1]][1])
    ident = {o: pid(c.ident[a], m) for o, (a, m) in split.items()}
    cc = FinCategory(obs, ms, ident, table, name=f"slice/{x}", check=False)
    proj = Functor(cc, c, {o: a for o, (a, _) in split.items()}, mdata, check=False)
    return cc, proj


# -- colimits and limits

class Colimit:
    """Quotient of the disjoint union by x ~ F(m)(x), with least-key representatives."""

    def __init__(self, pairs: Iterable[tuple], relations: Iterable[tuple[tuple, tuple]]):
        uf = UnionFind()
        pairs = list(pairs)
        for p in pairs:
            uf[p]
        for p, q in relations:
            uf.union(p, q)
        self._rep: dict[tuple, tuple] = {}
        self.classes: dict[tuple, tuple] = {}
        for block in uf.to_sets():
            members = tuple(sorted(block, key=ekey))
            for m in members:
                self._rep[m] = members[0]
            self.classes[members[0]] = members
        self.elements = sorted_elems(self.classes)

    def coprojection(self, obj: str, x: Any) -> tuple:
        return self._rep[(obj, x)]

    def cls(self, key: tuple) -> tuple:
        return self._rep[key]

    def __len__(self) -> int:
        return len(self.elements)


def colimit(sf: SetFunctor) -> Colimit:
    c = sf.dom
    pairs = [(x, e) for x in c.objects for e in sf.sets[x]]
    rel = [((c.src[m], e), (c.tgt[m], v)) for m in c.morphisms for e, v in sf.maps[m].items()]
    return Colimit(pairs, rel)


def limit(sf: SetFunctor) -> list[dict[str, Any]]:
    """Compatible families (x_o) with F(m)(x_src) = x_tgt, by backtracking."""
    c = sf.dom
    order = list(c.objects)
    pos = {x: i for i, x in enumerate(order)}
    # constraints checked once both endpoints are assigned
    checks: dict[int, list[str]] = defaultdict(list)
    for m in c.morphisms:
        if c.is_identity(m):
            continue
        checks[max(pos[c.src[m]], pos[c.tgt[m]])].append(m)
    out: list[dict[str, Any]] = []
    fam: dict[str, Any] = {}

    def go(i: int) -> None:
        if i == len(order):
            out.append(dict(fam))
            return
        x = order[i]
        for e in sf.sets[x]:
            fam[x] = e
            if all(sf.maps[m][fam[c.src[m]]] == fam[c.tgt[m]] for m in checks[i]):
                go(i + 1)
        fam.pop(x, None)

    go(0)
    return out


def twisted_arrow(c: FinCategory) -> FinCategory:
    """Objects are morphisms u of c; a morphism u -> v is a pair (a, b) with v = b u a.

    meta["parts"] maps each morphism id to its pair (a, b).
    """
    ms, table, parts = {}, {}, {}
    for u in c.morphisms:
        for a in c.into(c.src[u]):
            for b in c.out(c.tgt[u]):
                mid = pid(u, a, b)
                ms[mid] = (u, c.comp_many(b, u, a))
                parts[mid] = (a, b)
    for m1, (u, v) in ms.items():
        a1, b1 = parts[m1]
        for a2 in c.into(c.src[v]):
            for b2 in c.out(c.tgt[v]):
                table[pid(v, a2, b2), m1] = pid(u, c.table[a1, a2], c.table[b2, b1])
    ident = {u: pid(u, c.ident[c.src[u]], c.ident[c.tgt[u]]) for u in c.morphisms}
    tw = FinCategory(list(c.morphisms), ms, ident, table, name="tw", check=False)
    tw.meta["parts"] = parts
    return tw


def functions(xs: Sequence, ys: Sequence) -> list[tuple]:
    """All functions xs -> ys as tuples of pairs."""
    return [tuple(zip(xs, vals)) for vals in itertools.product(ys, repeat=len(xs))]


def natural_transformations(f: SetFunctor, g: SetFunctor) -> list[dict[str, dict]]:
    """All natural maps f => g, computed as the end of hom(f -, g -) via `limit`."""
    c = f.dom
    if g.dom != c:
        raise CategoryError("natural transformations need a common domain")
    tw = twisted_arrow(c)
    sets = {u: functions(f.sets[c.src[u]], g.sets[c.tgt[u]]) for u in c.morphisms}
    maps = {}
    for mid in tw.morphisms:
        u, v = tw.src[mid], tw.tgt[mid]
        a, b = tw.meta["parts"][mid]
        fa, gb = f.maps[a], g.maps[b]
        maps[mid] = {phi: tuple((x, gb[dict(phi)[fa[x]]]) for x in f.sets[c.src[v]])
                     for phi in sets[u]}
    out = []
    for fam in limit(SetFunctor(tw, sets, maps, check=False)):
        out.append({x: dict(fam[c.ident[x]]) for x in c.objects})
    return out


# -- Kan extensions

class KanExtension:
    """Pointwise left Kan extension with its colimit data and unit."""

    def __init__(self, functor: SetFunctor, colims: dict[str, Colimit], unit: dict[str, dict]):
        self.functor = functor
        self.colims = colims
        self.unit = unit


def left_kan_extension(x: SetFunctor, g: Functor) -> KanExtension:
    """Lan_g x, computed at b as the colimit of x over the slice g_{/b}.

    Elements are representatives (a, m, e) with m : g(a) -> b and e in x(a).
    """
    a_cat, b_cat = g.dom, g.cod
    if x.dom != a_cat:
        raise CategoryError("Kan extension needs dom(x) = dom(g)")
    colims = {}
    for b in b_cat.objects:
        pairs, rel = [], []
        for a in a_cat.objects:
            for m in b_cat.hom(g.ob[a], b):
                pairs.extend((a, m, e) for e in x.sets[a])
        for k in a_cat.morphisms:
            if a_cat.is_identity(k):
                continue
            a, a2 = a_cat.src[k], a_cat.tgt[k]
            gk, xk = g.mor[k], x.maps[k]
            for m2 in b_cat.hom(g.ob[a2], b):
                m = b_cat.table[m2, gk]
                for e in x.sets[a]:
                    rel.append(((a, m, e), (a2, m2, xk[e])))
        colims[b] = _KeyColimit(pairs, rel)
    sets = {b: colims[b].elements for b in b_cat.objects}
    maps = {}
    for n in b_cat.morphisms:
        cb = colims[b_cat.tgt[n]]
        maps[n] = {(a, m, e): cb.cls((a, b_cat.table[n, m], e)) for (a, m, e) in sets[b_cat.src[n]]}
    lan = SetFunctor(b_cat, sets, maps, check=False)
    unit = {a: {e: colims[g.ob[a]].cls((a, b_cat.ident[g.ob[a]], e)) for e in x.sets[a]}
            for a in a_cat.objects}
    return KanExtension(lan, colims, unit)


class _KeyColimit(Colimit):
    def __init__(self, keys, relations):
        uf = UnionFind()
        for k in keys:
            uf[k]
        for p, q in relations:
            uf.union(p, q)
        self._rep = {}
        self.classes = {}
        for block in uf.to_sets():
            members = tuple(sorted(block, key=ekey))
            for m in members:
                self._rep[m] = members[0]
            self.classes[members[0]] = members
        self.elements = sorted_elems(self.classes)


# -- fibrations

def right_fibration_witness(f: Functor, excuse: Callable[[str, str], bool] | None = None) -> tuple | None:
    """None if f is a right fibration, otherwise a witness.

    Right fibration is meant in the homotopical sense used for nerves: every
    m : y -> f(a) lifts to a morphism ending at a, and every morphism of the
    domain is cartesian.  Lifts are then unique up to unique isomorphism.
    excuse(m, a) may waive the existence of a lift, for domains that are
    truncations of a larger category.
    """
    c, d = f.dom, f.cod
    for a in c.objects:
        images = {f.mor[m] for m in c.into(a)}
        for m in d.into(f.ob[a]):
            if m not in images and not (excuse is not None and excuse(m, a)):
                return ("no lift", m, a)
    # mt : b -> a is cartesian iff, for each object x, kt |-> (f kt, mt kt) is a
    # bijection from hom(x, b) onto the pairs (k, h) with f(mt) k = f(h)
    for mt in c.morphisms:
        b, a = c.src[mt], c.tgt[mt]
        fm = f.mor[mt]
        for x in c.objects:
            hs = c.hom(x, a)
            if not hs:
                continue
            sols = Counter((f.mor[kt], c.table[mt, kt]) for kt in c.hom(x, b))
            over = defaultdict(list)
            for h in hs:
                over[f.mor[h]].append(h)
            pairs = 0
            for k in d.hom(f.ob[x], f.ob[b]):
                group = over.get(d.table[fm, k], ())
                pairs += len(group)
                for h in group:
                    if sols[k, h] != 1:
                        return ("not cartesian", mt, h, k, sols[k, h])
            if pairs != sum(sols.values()):
                # a filler whose pair is not a valid square cannot occur
                raise CategoryError("functor does not preserve composition")
    return None


def is_right_fibration(f: Functor) -> bool:
    return right_fibration_witness(f) is None


def left_fibration_witness(f: Functor) -> tuple | None:
    return right_fibration_witness(f.op())


def is_left_fibration(f: Functor) -> bool:
    return left_fibration_witness(f) is None


def isofibration_witness(f: Functor) -> tuple | None:
    """None if every isomorphism out of f(a) lifts to an isomorphism out of a."""
    c, d = f.dom, f.cod
    for a in c.objects:
        lifted = {f.mor[m] for m in c.out(a) if c.is_iso(m)}
        for m in d.out(f.ob[a]):
            if d.is_iso(m) and m not in lifted:
                return ("no iso lift", m, a)
    return None


def is_isofibration(f: Functor) -> bool:
    return isofibration_witness(f) is None


# -- category of elements

def eid(e: Any) -> str:
    return e if isinstance(e, str) else repr(e)


def grothendieck(f: SetFunctor) -> tuple[FinCategory, Functor]:
    """Category of elements of a presheaf given as a SetFunctor on c^op.

    Objects (X, x) with x in F(X); a morphism (X, x) -> (Y, y) is m : X -> Y
    in c with F(m)(y) = x.  meta["point"] maps object ids to (X, x).
    """
    c = opposite(f.dom)
    point = {}
    obs = []
    for x in c.objects:
        for e in f.sets[x]:
            o = pid(x, eid(e))
            obs.append(o)
            point[o] = (x, e)
    ms, mdata = {}, {}
    for m in c.morphisms:
        X, Y = c.src[m], c.tgt[m]
        for y in f.sets[Y]:
            x = f.maps[m][y]
            mid = pid(m, eid(y))
            ms[mid] = (pid(X, eid(x)), pid(Y, eid(y)))
            mdata[mid] = (m, y)
    table = {}
    for m1, (m, y) in mdata.items():
        Y = c.tgt[m]
        for n in c.out(Y):
            z_list = [z for z in f.sets[c.tgt[n]] if f.maps[n][z] == y]
            for z in z_list:
                table[pid(n, eid(z)), m1] = pid(c.table[n, m], eid(z))
    ident = {pid(x, eid(e)): pid(c.ident[x], eid(e)) for x in c.objects for e in f.sets[x]}
    el = FinCategory(obs, ms, ident, table, name="el", check=False)
    el.meta["point"] = point
    proj = Functor(el, c, {o: xe[0] for o, xe in point.items()},
                   {mid: me[0] for mid, me in mdata.items()}, check=False)
    return el, proj


# -- isomorphism searches

def find_isomorphisms(c: FinCategory, d: FinCategory, caps: Caps | None = DEFAULT_CAPS,
                      ob_hint: Callable[[str, str], bool] | None = None):
    """Yield every isomorphism of categories c -> d as a Functor."""
    if caps is not None:
        c.check_caps(caps)
        d.check_caps(caps)
    if len(c.objects) != len(d.objects) or len(c.morphisms) != len(d.morphisms):
        return

    def inv(cat, x):
        return (len(cat.hom(x, x)), len(cat.into(x)), len(cat.out(x)))

    obs = list(c.objects)
    ob: dict[str, str] = {}
    used: set[str] = set()
    triples: dict[str, list] = defaultdict(list)
    for (g, f2), h in c.table.items():
        for m in {g, f2, h}:
            triples[m].append((g, f2, h))
    movable = [m for m in c.morphisms if not c.is_identity(m)]

    def morph(i: int, mor: dict, taken: set):
        if i == len(movable):
            yield Functor(c, d, dict(ob), dict(mor), check=False)
            return
        m = movable[i]
        for n in d.hom(ob[c.src[m]], ob[c.tgt[m]]):
            if n in taken or d.is_identity(n):
                continue
            mor[m] = n
            ok = True
            for g, f2, h in triples[m]:
                if g in mor and f2 in mor and h in mor and d.table[mor[g], mor[f2]] != mor[h]:
                    ok = False
                    break
            if ok:
                taken.add(n)
                yield from morph(i + 1, mor, taken)
                taken.discard(n)
            del mor[m]

    def objs(i: int):
        if i == len(obs):
            mor = {c.ident[x]: d.ident[ob[x]] for x in obs}
            yield from morph(0, mor, set(mor.values()))
            return
        x = obs[i]
        for y in d.objects:
            if y in used or inv(c, x) != inv(d, y):
                continue
            if ob_hint is not None and not ob_hint(x, y):
                continue
            if any(len(c.hom(x, z)) != len(d.hom(y, ob[z])) or len(c.hom(z, x)) != len(d.hom(ob[z], y))
                   for z in ob):
                continue
            ob[x] = y
            used.add(y)
            yield from objs(i + 1)
            used.discard(y)
            del ob[x]

    yield from objs(0)


def find_isomorphism(c: FinCategory, d: FinCategory, caps: Caps | None = DEFAULT_CAPS,
                     accept: Callable[[Functor], bool] | None = None) -> Functor | None:
    for iso in find_isomorphisms(c, d, caps):
        if accept is None or accept(iso):
            return iso
    return None


def find_natural_iso(f: SetFunctor, g: SetFunctor, budget: int = 200_000) -> dict[str, dict] | None:
    """A natural bijection f => g, or None.

    Elements are assigned one at a time; each choice e -> b is propagated along
    every morphism out of e, so a G-set costs one choice per orbit.  Raises
    CapExceeded when the search budget runs out before a decision.
    """
    c = f.dom
    if g.dom != c or f.sizes() != g.sizes():
        return None
    pending = [(x, e) for x in c.objects for e in f.sets[x]]
    comp: dict[str, dict] = {x: {} for x in c.objects}
    used: dict[str, set] = {x: set() for x in c.objects}
    steps = [0]

    def assign(x, e, b, trail) -> bool:
        stack = [(x, e, b)]
        while stack:
            x, e, b = stack.pop()
            have = comp[x].get(e)
            if have is not None:
                if have != b:
                    return False
                continue
            if b in used[x]:
                return False
            comp[x][e] = b
            used[x].add(b)
            trail.append((x, e))
            for m in c.out(x):
                stack.append((c.tgt[m], f.maps[m][e], g.maps[m][b]))
        return True

    def undo(trail) -> None:
        for x, e in trail:
            used[x].discard(comp[x].pop(e))

    def next_open(i: int) -> int:
        while i < len(pending) and pending[i][1] in comp[pending[i][0]]:
            i += 1
        return i

    # each frame is (pending index, remaining candidates, trail of the current choice)
    i = next_open(0)
    if i == len(pending):
        return {x: dict(v) for x, v in comp.items()}
    frames = [(i, iter(g.sets[pending[i][0]]), [])]
    while frames:
        i, cands, trail = frames[-1]
        undo(trail)
        trail.clear()
        x, e = pending[i]
        for b in cands:
            if b in used[x]:
                continue
            steps[0] += 1
            if steps[0] > budget:
                raise CapExceeded("natural isomorphism search budget exhausted")
            if assign(x, e, b, trail):
                break
            undo(trail)
            trail.clear()
        else:
            frames.pop()
            continue
        j = next_open(i + 1)
        if j == len(pending):
            return {x: dict(v) for x, v in comp.items()}
        frames.append((j, iter(g.sets[pending[j][0]]), []))
    return None


def is_natural(f: SetFunctor, g: SetFunctor, comp: Mapping[str, Mapping]) -> bool:
    c = f.dom
    return all(comp[c.tgt[m]][f.maps[m][e]] == g.maps[m][comp[c.src[m]][e]]
               for m in c.morphisms for e in f.sets[c.src[m]])
