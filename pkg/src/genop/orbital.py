"""Orbit categories of finite groups, orbital pairs, transfer systems and the
F-multicategory of pullback squares built from an orbital pair."""
from __future__ import annotations

import itertools
from typing import Any, Iterable, Sequence

from .completion import FCMor, fc_compose, fc_identity, fc_mor_id, mu_on_morphism
from .fincat import (CapExceeded, CategoryError, FinCategory, Functor, ekey, full_subcategory,
                     terminal)
from .fmulti import FMulticategory, MultiFunctor
from .report import Report

GROUP_ORDER_CAP = 32


class OrbitalConditionError(CategoryError):
    pass


# -- groups

class FiniteGroup:
    def __init__(self, elements: Sequence[str], mul: dict[tuple[str, str], str], name: str = "",
                 check: bool = True):
        self.elements = list(elements)
        self.mul = dict(mul)
        self.name = name
        if check:
            self.validate()
        self.identity = next(e for e in self.elements
                             if all(self.mul[e, x] == x for x in self.elements))
        self.inv = {x: next(y for y in self.elements if self.mul[x, y] == self.identity)
                    for x in self.elements}

    def validate(self) -> None:
        els = set(self.elements)
        if len(els) != len(self.elements) or not els:
            raise CategoryError("group elements must be distinct and nonempty")
        for a in self.elements:
            for b in self.elements:
                if self.mul.get((a, b)) not in els:
                    raise CategoryError(f"product {a}*{b} missing or outside the group")
        for a, b, c in itertools.product(self.elements, repeat=3):
            if self.mul[self.mul[a, b], c] != self.mul[a, self.mul[b, c]]:
                raise CategoryError(f"associativity fails at ({a},{b},{c})")
        units = [e for e in self.elements if all(self.mul[e, x] == x == self.mul[x, e] for x in self.elements)]
        if not units:
            raise CategoryError("no identity element")
        for a in self.elements:
            if not any(self.mul[a, b] == units[0] for b in self.elements):
                raise CategoryError(f"{a} has no inverse")

    @property
    def order(self) -> int:
        return len(self.elements)

    def conj(self, g: str, x: str) -> str:
        """g^-1 x g"""
        return self.mul[self.mul[self.inv[g], x], g]

    def generate(self, gens: Iterable[str]) -> frozenset:
        out = {self.identity}
        frontier = list(gens)
        while frontier:
            x = frontier.pop()
            if x in out:
                continue
            out.add(x)
            frontier.extend(self.mul[x, y] for y in list(out))
            frontier.extend(self.mul[y, x] for y in list(out))
        return frozenset(out)

    def subgroups(self) -> list[frozenset]:
        found = {frozenset([self.identity])}
        frontier = list(found)
        while frontier:
            h = frontier.pop()
            for g in self.elements:
                if g in h:
                    continue
                k = self.generate(set(h) | {g})
                if k not in found:
                    found.add(k)
                    frontier.append(k)
        pos = {x: i for i, x in enumerate(self.elements)}
        return sorted(found, key=lambda s: (len(s), sorted(pos[x] for x in s)))

    def to_json(self) -> dict:
        idx = {x: i for i, x in enumerate(self.elements)}
        return {"elements": list(self.elements),
                "table": [[idx[self.mul[a, b]] for b in self.elements] for a in self.elements]}

    @classmethod
    def from_json(cls, doc: dict) -> "FiniteGroup":
        if "cyclic" in doc:
            return cyclic(int(doc["cyclic"]))
        els = [str(e) for e in doc["elements"]]
        table = doc["table"]
        if len(table) != len(els) or any(len(row) != len(els) for row in table):
            raise CategoryError("multiplication table has the wrong shape")
        mul = {}
        for i, a in enumerate(els):
            for j, b in enumerate(els):
                v = table[i][j]
                mul[a, b] = els[v] if isinstance(v, int) else str(v)
        return cls(els, mul, name=doc.get("name", ""))


def cyclic(n: int) -> FiniteGroup:
    if n < 1:
        raise CategoryError("cyclic group order must be positive")
    els = [str(i) for i in range(n)]
    mul = {(str(a), str(b)): str((a + b) % n) for a in range(n) for b in range(n)}
    return FiniteGroup(els, mul, name=f"C{n}", check=False)


def parse_group(text: str) -> FiniteGroup:
    """'cyclic:n' or 'trivial'."""
    if text == "trivial":
        return cyclic(1)
    if text.startswith("cyclic:"):
        return cyclic(int(text.split(":", 1)[1]))
    raise CategoryError(f"unknown group description {text!r}")


def relabel(g: FiniteGroup, names: dict[str, str]) -> FiniteGroup:
    """An isomorphic copy with elements renamed."""
    return FiniteGroup([names[x] for x in g.elements],
                       {(names[a], names[b]): names[c] for (a, b), c in g.mul.items()},
                       name=g.name + "'", check=False)


# -- orbit category

def subgroup_id(g: FiniteGroup, h: frozenset) -> str:
    pos = {x: i for i, x in enumerate(g.elements)}
    return "<" + ",".join(x for x in sorted(h, key=pos.get)) + ">"


def orbit_category(g: FiniteGroup, order_cap: int = GROUP_ORDER_CAP) -> FinCategory:
    """Objects are all subgroups H (standing for G/H); a morphism G/H -> G/K is a
    coset cK with c^-1 H c contained in K, acting by xH -> xcK.

    meta["subgroup"] maps object ids to subgroups, meta["coset"] maps morphism
    ids to (H, K, coset).
    """
    if g.order > order_cap:
        raise CapExceeded(f"group of order {g.order} exceeds the cap {order_cap}")
    subs = g.subgroups()
    sid = {h: subgroup_id(g, h) for h in subs}
    pos = {x: i for i, x in enumerate(g.elements)}
    ms, coset_of = {}, {}

    def coset(c, k):
        return frozenset(g.mul[c, x] for x in k)

    def mid(h, k, cs):
        rep = min(cs, key=pos.get)
        return f"{sid[h]}>{sid[k]}:{rep}"

    for h in subs:
        for k in subs:
            seen = set()
            for c in g.elements:
                cs = coset(c, k)
                if cs in seen:
                    continue
                seen.add(cs)
                if all(g.conj(c, x) in k for x in h):
                    m = mid(h, k, cs)
                    ms[m] = (sid[h], sid[k])
                    coset_of[m] = (h, k, cs)
    table = {}
    for m1, (h, k, c1) in coset_of.items():
        for m2, (k2, l, c2) in coset_of.items():
            if k2 != k:
                continue
            a, b = min(c1, key=pos.get), min(c2, key=pos.get)
            table[m2, m1] = mid(h, l, coset(g.mul[a, b], l))
    ident = {sid[h]: mid(h, h, h) for h in subs}
    cat = FinCategory([sid[h] for h in subs], ms, ident, table, name=f"O_{g.name or 'G'}")
    cat.meta["subgroup"] = {sid[h]: h for h in subs}
    cat.meta["coset"] = coset_of
    return cat


def free_orbit_object(g: FiniteGroup, o: FinCategory) -> str:
    """The object G/e."""
    return subgroup_id(g, frozenset([g.identity]))


def bg_inclusion(g: FiniteGroup, o: FinCategory | None = None) -> Functor:
    """BG as the full subcategory on G/e, with its inclusion into O_G."""
    o = orbit_category(g) if o is None else o
    bg = full_subcategory(o, [free_orbit_object(g, o)])
    return Functor(bg, o, {x: x for x in bg.objects}, {m: m for m in bg.morphisms})


# -- orbital pairs

class OrbitalPair:
    def __init__(self, o: FinCategory, t_flags: dict[str, bool], name: str = ""):
        self.o = o
        self.t_flags = {m: bool(t_flags.get(m, False)) for m in o.morphisms}
        self.name = name or o.name

    @property
    def t_morphisms(self) -> list[str]:
        return [m for m in self.o.morphisms if self.t_flags[m]]

    def in_t(self, m: str) -> bool:
        return self.t_flags[m]

    def to_json(self) -> dict:
        return {"category": self.o.to_json(), "t": sorted(self.t_morphisms, key=ekey)}

    @classmethod
    def from_json(cls, doc: dict) -> "OrbitalPair":
        o = FinCategory.from_json(doc["category"])
        t = set(doc["t"])
        unknown = t - set(o.morphisms)
        if unknown:
            raise CategoryError(f"T names unknown morphisms {sorted(unknown)}")
        return cls(o, {m: m in t for m in o.morphisms})


def core_pair(c: FinCategory) -> OrbitalPair:
    return OrbitalPair(c, {m: c.is_iso(m) for m in c.morphisms}, name=f"({c.name}, core)")


def full_pair(c: FinCategory) -> OrbitalPair:
    return OrbitalPair(c, {m: True for m in c.morphisms}, name=f"({c.name}, {c.name})")


def cone_components(o: FinCategory, f: str, g: str) -> list[list[tuple[str, str]]]:
    """Connected components of the category of cones (a : w -> x, b : w -> y)
    over the cospan f : x -> z <- y : g, with w ranging over single objects."""
    x, y = o.src[f], o.src[g]
    cones = [(a, b) for w in o.objects for a in o.hom(w, x) for b in o.hom(w, y)
             if o.table[f, a] == o.table[g, b]]
    idx = {c: i for i, c in enumerate(cones)}
    parent = list(range(len(cones)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for (a, b) in cones:
        w = o.src[a]
        for v in o.objects:
            for m in o.hom(v, w):
                c2 = (o.table[a, m], o.table[b, m])
                parent[find(idx[c2])] = find(idx[a, b])
    comps: dict[int, list] = {}
    for c in cones:
        comps.setdefault(find(idx[c]), []).append(c)
    return [sorted(v, key=ekey) for _, v in sorted(comps.items())]


def terminal_cones(o: FinCategory, comp: list[tuple[str, str]]) -> list[tuple[str, str]]:
    """Cones in the component through which every cone of the component factors uniquely."""
    out = []
    for (a, b) in comp:
        w = o.src[a]
        ok = True
        for (a2, b2) in comp:
            w2 = o.src[a2]
            n = sum(1 for m in o.hom(w2, w) if o.table[a, m] == a2 and o.table[b, m] == b2)
            if n != 1:
                ok = False
                break
        if ok:
            out.append((a, b))
    return out


def check_orbital_pair(p: OrbitalPair, bound: int = 4) -> Report:
    """Wideness, closure under composition, and the pullback condition.

    Pullbacks in F O are computed blockwise from cospans of single objects, so
    checking those cospans decides the condition for every arity; the bound is
    recorded in the report for uniformity.
    """
    o, t = p.o, p.t_flags
    rep = Report(f"orbital pair {p.name}", arity_bound=bound)
    w = next((x for x in o.objects if not t[o.ident[x]]), None)
    rep.add("wide", None if w is None else ("identity not in T", w))
    w = None
    for (g, f), h in o.table.items():
        if t[g] and t[f] and not t[h]:
            w = ("composite leaves T", g, f, h)
            break
    rep.add("closed under composition", w)
    rep.add("pullbacks of T-morphisms", _pullback_witness(p))
    return rep


def _pullback_witness(p: OrbitalPair):
    o, t = p.o, p.t_flags
    for g in o.morphisms:
        if not t[g]:
            continue
        for f in o.morphisms:
            if o.tgt[f] != o.tgt[g]:
                continue
            for comp in cone_components(o, f, g):
                tops = terminal_cones(o, comp)
                if not tops:
                    return {"cospan": [f, g], "problem": "no pullback", "cone": list(comp[0])}
                for (a, b) in tops:
                    if not t[a]:
                        return {"cospan": [f, g], "problem": "pulled-back leg not in T",
                                "cone": [a, b]}
    return None


def is_orbital_pair(p: OrbitalPair, bound: int = 4) -> bool:
    return check_orbital_pair(p, bound).ok


def pullback_in_fo(p: OrbitalPair, f: FCMor, x: Sequence[str], g: FCMor, y: Sequence[str],
                   z: Sequence[str]) -> tuple[tuple[str, ...], FCMor, FCMor] | None:
    """A chosen pullback (P, P -> x, P -> y) in F O of f : x -> z <- y : g, or None."""
    o = p.o
    obs, left, right = [], [], []
    for i, xi in enumerate(x):
        for j, yj in enumerate(y):
            if f.index_map[i] != g.index_map[j]:
                continue
            for comp in cone_components(o, f.components[i], g.components[j]):
                tops = terminal_cones(o, comp)
                if not tops:
                    return None
                a, b = tops[0]
                obs.append(o.src[a])
                left.append((i, a))
                right.append((j, b))
    return (tuple(obs), FCMor(tuple(i for i, _ in left), tuple(a for _, a in left)),
            FCMor(tuple(j for j, _ in right), tuple(b for _, b in right)))


# -- transfer systems

class TransferSystem:
    def __init__(self, group: FiniteGroup, pair: OrbitalPair, edges: frozenset):
        self.group = group
        self.pair = pair
        self.edges = edges

    def to_json(self) -> dict:
        return {"edges": [list(e) for e in sorted(self.edges)],
                "t": sorted(self.pair.t_morphisms, key=ekey)}


def transfer_edges(o: FinCategory, t: dict[str, bool]) -> frozenset:
    """Pairs (K, H), K a proper subgroup of H, whose inclusion G/K -> G/H lies in T."""
    out = set()
    for m, (h, k, cs) in o.meta["coset"].items():
        if t[m] and h != k and h <= k and cs == k:
            out.add((o.src[m], o.tgt[m]))
    return frozenset(out)


def transfer_systems(g: FiniteGroup, max_candidates: int = 1 << 16) -> tuple[list[TransferSystem], list[tuple[int, int]]]:
    """All orbital subcategories of O_G with their inclusion poset as Hasse edges (i, j) meaning i < j.

    Every orbital subcategory contains all isomorphisms (each iso is the leg of a
    pullback of an identity), so only subsets of non-isomorphisms are searched.
    """
    o = orbit_category(g)
    isos = [m for m in o.morphisms if o.is_iso(m)]
    rest = [m for m in o.morphisms if not o.is_iso(m)]
    if 2 ** len(rest) > max_candidates:
        raise CapExceeded(f"{2 ** len(rest)} candidate subcategories exceed the cap {max_candidates}")
    found = []
    for bits in range(2 ** len(rest)):
        chosen = set(isos) | {m for i, m in enumerate(rest) if bits >> i & 1}
        flags = {m: m in chosen for m in o.morphisms}
        if any(flags[g2] and flags[f] and not flags[h] for (g2, f), h in o.table.items()):
            continue
        pair = OrbitalPair(o, flags, name=f"O_T({g.name})")
        if _pullback_witness(pair) is None:
            found.append(TransferSystem(g, pair, transfer_edges(o, flags)))
    found.sort(key=lambda ts: (len(ts.pair.t_morphisms), sorted(ts.edges)))
    return found, hasse_edges([frozenset(ts.pair.t_morphisms) for ts in found])


def brute_force_orbital_subcategories(o: FinCategory) -> list[frozenset]:
    """Every wide subcategory of o passing the orbital check, searching all subsets."""
    non_ids = [m for m in o.morphisms if not o.is_identity(m)]
    out = []
    for bits in range(2 ** len(non_ids)):
        chosen = set(o.ident.values()) | {m for i, m in enumerate(non_ids) if bits >> i & 1}
        pair = OrbitalPair(o, {m: m in chosen for m in o.morphisms})
        if check_orbital_pair(pair).ok:
            out.append(frozenset(chosen))
    return out


def hasse_edges(sets: list[frozenset]) -> list[tuple[int, int]]:
    edges = []
    for i, a in enumerate(sets):
        for j, b in enumerate(sets):
            if i != j and a < b and not any(a < c < b for c in sets):
                edges.append((i, j))
    return edges


def poset_extremes(sets: list[frozenset]) -> tuple[list[int], list[int]]:
    """Indices of minimal and maximal elements under inclusion."""
    mins = [i for i, a in enumerate(sets) if not any(b < a for b in sets)]
    maxs = [i for i, a in enumerate(sets) if not any(a < b for b in sets)]
    return mins, maxs


# -- the F-multicategory of pullback squares

def _is_pullback_square(p: OrbitalPair, f: FCMor, a_seq, g: FCMor, c_seq, h: FCMor, k: str) -> bool:
    """Is the square h : A -> C over k : B -> D (f : A -> B, g : C -> D) a pullback in F O?

    Checked on single test objects W: hom(W, A) must biject onto pairs
    (c in hom(W, C), b in hom(W, B)) with g c = k b.
    """
    o = p.o
    b = o.src[k]
    for w in o.objects:
        image = set()
        count = 0
        for i, ai in enumerate(a_seq):
            for z in o.hom(w, ai):
                count += 1
                image.add((h.index_map[i], o.table[h.components[i], z], o.table[f.components[i], z]))
        if len(image) != count:
            return False
        target = 0
        for j, cj in enumerate(c_seq):
            for c in o.hom(w, cj):
                gc = o.table[g.components[j], c]
                target += sum(1 for bb in o.hom(w, b) if o.table[k, bb] == gc)
        if target != count:
            return False
    return True


def sigma_OT(p: OrbitalPair, bound: int = 3, check: bool = True) -> FMulticategory:
    """Multimorphisms are F T maps A -> b with b single and len(A) <= bound;
    morphisms are pullback squares in F O."""
    if check:
        rep = check_orbital_pair(p, bound)
        if not rep.ok:
            raise OrbitalConditionError(f"orbital condition fails: {rep.failures()[0].witness}")
    o = p.o
    t = p.t_flags
    ob_data: dict[str, tuple[tuple[str, ...], str, FCMor]] = {}
    for b in o.objects:
        for n in range(bound + 1):
            for a_seq in itertools.product(o.objects, repeat=n):
                choices = [[m for m in o.hom(ai, b) if t[m]] for ai in a_seq]
                for comps in itertools.product(*choices):
                    f = FCMor((0,) * n, tuple(comps))
                    ob_data[fc_mor_id(a_seq, (b,), f)] = (a_seq, b, f)

    def sq_id(fid, gid, h: FCMor, k: str) -> str:
        return f"{fid}=>{gid}:{','.join(map(str, h.index_map))}|{','.join(h.components)}|{k}"

    ms, sq = {}, {}
    by_target: dict[str, list[str]] = {}
    for fid, (_, b, _) in ob_data.items():
        by_target.setdefault(b, []).append(fid)
    for fid, (a_seq, b, f) in ob_data.items():
        for d in o.objects:
            for k in o.hom(b, d):
                for gid in by_target[d]:
                    c_seq, _, g = ob_data[gid]
                    for alpha in itertools.product(range(len(c_seq)), repeat=len(a_seq)):
                        choices = []
                        for i, j in enumerate(alpha):
                            want = o.table[k, f.components[i]]
                            choices.append([h for h in o.hom(a_seq[i], c_seq[j])
                                            if o.table[g.components[j], h] == want])
                        for comps in itertools.product(*choices):
                            h = FCMor(tuple(alpha), tuple(comps))
                            if _is_pullback_square(p, f, a_seq, g, c_seq, h, k):
                                u = sq_id(fid, gid, h, k)
                                ms[u] = (fid, gid)
                                sq[u] = (h, k)
    index = {(ms[u], sq[u]): u for u in ms}
    table = {}
    for u1, (f1, g1) in ms.items():
        h1, k1 = sq[u1]
        for u2, (f2, g2) in ms.items():
            if f2 != g1:
                continue
            h2, k2 = sq[u2]
            h = fc_compose(o, h2, h1)
            table[u2, u1] = index[(f1, g2), (h, o.table[k2, k1])]
    ident = {fid: index[(fid, fid), (fc_identity(o, a), o.ident[b])] for fid, (a, b, _) in ob_data.items()}
    m1 = FinCategory(list(ob_data), ms, ident, table, name=f"Sigma_{p.name}<={bound}", check=False)
    m1.meta["arrow"] = ob_data
    m1.meta["square"] = sq
    src_ob = {fid: a for fid, (a, _, _) in ob_data.items()}
    src_mor = {u: h for u, (h, _) in sq.items()}
    target = Functor(m1, o, {fid: b for fid, (_, b, _) in ob_data.items()},
                     {u: k for u, (_, k) in sq.items()}, check=False)
    one_ob = {x: fc_mor_id((x,), (x,), FCMor((0,), (o.ident[x],))) for x in o.objects}
    one_mor = {}
    for m in o.morphisms:
        x, y = o.src[m], o.tgt[m]
        one_mor[m] = index[(one_ob[x], one_ob[y]), (FCMor((0,), (m,)), m)]
    unit = Functor(o, m1, one_ob, one_mor, check=False)

    def comp_ob(fid, gids):
        a_seq, b, f = ob_data[fid]
        seq, comps = [], []
        for i, gid in enumerate(gids):
            ai, _, gi = ob_data[gid]
            seq.extend(ai)
            comps.extend(o.table[f.components[i], c] for c in gi.components)
        return fc_mor_id(tuple(seq), (b,), FCMor((0,) * len(seq), tuple(comps)))

    def comp_mor(u, vs, gs, gs2):
        f, f2 = ms[u]
        h, k = sq[u]
        blocks_src = [ob_data[g][0] for g in gs]
        blocks_tgt = [ob_data[g][0] for g in gs2]
        flat = mu_on_morphism(blocks_src, blocks_tgt, h.index_map, [sq[v][0] for v in vs])
        return index[(comp_ob(f, gs), comp_ob(f2, gs2)), (flat, k)]

    out = FMulticategory(o, m1, src_ob, src_mor, target, unit, comp_ob, comp_mor, bound,
                         name=f"sigma_OT({p.name}, {bound})")

    def lift_exceeds_bound(k, fid):
        # the lift of k : y -> b ending at f : A -> b has source the pullback of f along k
        a_seq, b, f = ob_data[fid]
        pb = pullback_in_fo(p, FCMor((0,), (k,)), (o.src[k],), f, a_seq, (b,))
        return pb is not None and len(pb[0]) > bound

    out.lift_exceeds_bound = lift_exceeds_bound
    return out


def orbital_functor_witness(f: Functor, p1: OrbitalPair, p2: OrbitalPair) -> Any:
    """None if f is a functor of orbital pairs, else the offending data."""
    for m in p1.o.morphisms:
        if p1.t_flags[m] and not p2.t_flags[f.mor[m]]:
            return {"problem": "T not preserved", "morphism": m}
    o1, o2 = p1.o, p2.o
    for g in o1.morphisms:
        if not p1.t_flags[g]:
            continue
        for h in o1.morphisms:
            if o1.tgt[h] != o1.tgt[g]:
                continue
            comps1 = cone_components(o1, h, g)
            comps2 = cone_components(o2, f.mor[h], f.mor[g])
            # image of the chosen pullback must be a pullback: images of the
            # terminal cones must be terminal and every target component hit once
            hit = []
            for comp in comps1:
                a, b = terminal_cones(o1, comp)[0]
                fa, fb = f.mor[a], f.mor[b]
                where = [i for i, c2 in enumerate(comps2) if (fa, fb) in c2]
                if not where or (fa, fb) not in terminal_cones(o2, comps2[where[0]]):
                    return {"problem": "pullback not preserved", "cospan": [h, g]}
                hit.append(where[0])
            if sorted(hit) != list(range(len(comps2))):
                return {"problem": "pullback not preserved", "cospan": [h, g]}
    return None


def orbital_functor(f: Functor, p1: OrbitalPair, p2: OrbitalPair, m1: FMulticategory | None = None,
                    m2: FMulticategory | None = None, bound: int = 3) -> MultiFunctor:
    w = orbital_functor_witness(f, p1, p2)
    if w is not None:
        raise OrbitalConditionError(f"not a functor of orbital pairs: {w}")
    m1 = sigma_OT(p1, bound) if m1 is None else m1
    m2 = sigma_OT(p2, bound) if m2 is None else m2
    ob, mor = {}, {}
    for fid, (a, b, fm) in m1.m1.meta["arrow"].items():
        ob[fid] = fc_mor_id(tuple(f.ob[x] for x in a), (f.ob[b],),
                            FCMor(fm.index_map, tuple(f.mor[c] for c in fm.components)))
    index = {(m2.m1.src[u], m2.m1.tgt[u], m2.m1.meta["square"][u]): u for u in m2.m1.morphisms}
    for u, (h, k) in m1.m1.meta["square"].items():
        h2 = FCMor(h.index_map, tuple(f.mor[c] for c in h.components))
        mor[u] = index[ob[m1.m1.src[u]], ob[m1.m1.tgt[u]], (h2, f.mor[k])]
    phi1 = Functor(m1.m1, m2.m1, ob, mor)
    return MultiFunctor(m1, m2, f, phi1)


def terminal_pair() -> OrbitalPair:
    return full_pair(terminal())
