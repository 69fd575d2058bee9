"""Shared instance builders for the test modules and the acceptance suite."""
import itertools

from genop.fincat import (FinCategory, Functor, arrow, discrete, find_natural_iso, from_monoid, grothendieck,
                          is_natural, opposite, pid, product, terminal, walking_iso)
from genop.fmulti import MultiFunctor, nonsym, perm_id, sigma_star
from genop.operads.basechange import presheaf
from genop.operads.coloured import (Attachment, coloured_from_function, coloured_terminal, coloured_unary,
                                    coloured_unit)
from genop.operads.collections import collection

from oracles import chain, compositions, cyclic_monoid, random_set_functor, rng_for


def random_nonsym_pair(seed, bound=4):
    """A pair (S, T) over nonsym(bound) whose composite is exact."""
    m = nonsym(bound)
    rng = rng_for(seed)
    s_sizes = {k: rng.choice([0, 0, 1, 2]) for k in range(bound + 1)}
    t_sizes = {k: rng.choice([0, 1, 1, 2]) for k in range(bound + 1)}
    if t_sizes[0] and s_sizes[bound]:
        s_sizes[bound] = 0
    s = collection(m, {str(k): [f"s{k}{i}" for i in range(n)] for k, n in s_sizes.items()})
    t = collection(m, {str(k): [f"t{k}{i}" for i in range(n)] for k, n in t_sizes.items()})
    return m, s, t, s_sizes, t_sizes


def summands_biject(m, s, t, comp):
    """Whether the coprojections send the summands S(k) x T(n_1) x .. x T(n_k) bijectively
    onto the composite over nonsym."""
    for n in range(m.bound + 1):
        image = set()
        count = 0
        for k in range(m.bound + 1):
            for ns in compositions(n, k):
                p = m.p_ob_id(str(k), [str(x) for x in ns])
                if p not in m.composable.meta["ob"]:
                    continue
                for a in s(str(k)):
                    for bs in itertools.product(*(t(str(x)) for x in ns)):
                        image.add(comp.inj(p, (a, bs)))
                        count += 1
        if not count == len(image) == len(comp(str(n))):
            return False
    return True


def natural_isomorphism(a, b):
    """Some natural bijection a -> b, or None; verified independently of the search."""
    nt = find_natural_iso(a.functor, b.functor)
    if nt is not None:
        assert is_natural(a.functor, b.functor, nt)
        assert all(len(set(comp.values())) == len(comp) == len(b(x)) for x, comp in nt.items())
    return nt


def symmetric_collection(m, orbits, tag):
    """orbits: {k: [(kind, name)]}, kind 'trivial' or 'regular' Sigma_k-orbits.
    Regular elements are (name, p) acted on by precomposition."""
    values, spec = {}, {}
    for k, obs in orbits.items():
        els = []
        for kind, name in obs:
            if kind == "trivial":
                els.append((f"{tag}{name}", ()))
            else:
                els.extend((f"{tag}{name}", p) for p in itertools.permutations(range(k)))
        values[str(k)] = els

    def act(q, e):
        return e if e[1] == () else (e[0], tuple(e[1][j] for j in q))

    action = {}
    for u in m.m1.morphisms:
        p_u = m.m1.meta["perm"][u]
        action[u] = {e: act(p_u, e) for e in values.get(m.m1.src[u], [])}
    for k in range(m.bound + 1):
        spec[k] = (values.get(str(k), []), act)
    return collection(m, values, action), spec


def random_symmetric_pair(seed, bound=3):
    m = sigma_star(bound)
    rng = rng_for(seed)

    def orbits(no_nullary):
        out = {}
        for k in range(bound + 1):
            kinds = []
            for i in range(rng.choice([0, 0, 1, 1, 2])):
                kinds.append((rng.choice(["trivial", "regular"]) if k >= 2 else "trivial", f"{k}{i}"))
            if k == 0 and no_nullary:
                kinds = []
            out[k] = kinds
        return out

    so = orbits(False)
    to = orbits(True)
    s, s_spec = symmetric_collection(m, so, "s")
    t, t_spec = symmetric_collection(m, to, "t")
    return m, s, t, s_spec, t_spec


def drop_nullary(c, m=None):
    """The subcollection of c living in positive arity, rebuilt over m (an equal copy of c.m)."""
    m = m or c.m
    kept = {g: [] if m.arity(g) == 0 else list(c(g)) for g in m.m1.objects}
    return collection(m, kept, {w: {e: c.act(w, e) for e in kept[m.m1.tgt[w]]} for w in m.m1.morphisms})


def positive_collection(m, rng, tag):
    return collection(m, {str(k): [f"{tag}{k}{i}" for i in range(rng.choice([0, 1, 1, 2]))]
                          for k in range(1, m.bound + 1)})


def small_nonsym_triple(seed):
    """(S, T, U) over nonsym(3), small enough to count Hom sets exhaustively."""
    rng = rng_for(seed)
    m = nonsym(3)
    s = collection(m, {str(k): [f"s{k}{i}" for i in range(rng.choice([0, 1]))] for k in range(3)})
    t = positive_collection(m, rng, "t")
    u = collection(m, {str(k): [f"u{k}{i}" for i in range(rng.choice([0, 1, 2]))] for k in range(4)})
    return m, s, t, u


def _projection(c, d):
    cd = product(c, d)
    return Functor(cd, c, {pid(x, y): x for x in c.objects for y in d.objects},
                   {pid(f, g): f for f in c.morphisms for g in d.morphisms})


def random_fibrations(seed, count=10, max_morphisms=5):
    """(label, functor, kind) with kind "right" for category-of-elements projections
    and "iso" for projections c x g -> c with g a groupoid."""
    rng = rng_for(seed)
    bases = [terminal(), arrow(), walking_iso(), cyclic_monoid(2), discrete(["x", "y"]), chain(3)]
    groupoids = [walking_iso(), cyclic_monoid(2), discrete(["p", "q"])]
    out = []
    while len(out) < count:
        c = rng.choice(bases)
        if len(out) % 2 == 0:
            pre = random_set_functor(opposite(c), rng)
            f, kind, label = grothendieck(pre)[1], "right", f"el({c.name})"
        else:
            g = rng.choice(groupoids)
            f, kind, label = _projection(c, g), "iso", f"{c.name} x {g.name} -> {c.name}"
        if 0 < len(f.dom.morphisms) <= max_morphisms:
            out.append((label, f, kind))
    return out


def symmetrization(bound):
    """The inclusion nonsym -> sigma_star sending each arity to itself."""
    n, s = nonsym(bound), sigma_star(bound)
    return MultiFunctor(n, s, Functor(n.m0, s.m0, {"*": "*"}, {"id_*": "id_*"}),
                        Functor(n.m1, s.m1, {k: k for k in n.m1.objects},
                                {f"id_{k}": perm_id(int(k), tuple(range(int(k)))) for k in n.m1.objects}))


def two_colours(m, kind):
    return kind(m, presheaf(m, {x: ["p", "q"] for x in m.m0.objects}))


def _groupoid_z2():
    """Two objects, two parallel isomorphisms in each hom-set, composed by addition mod 2."""
    obs = ["0", "1"]
    ms = {f"{i}{j}{z}": (i, j) for i in obs for j in obs for z in range(2)}
    table = {(f"{j}{k}{z2}", f"{i}{j}{z1}"): f"{i}{k}{(z1 + z2) % 2}"
             for i in obs for j in obs for k in obs for z1 in range(2) for z2 in range(2)}
    return FinCategory(obs, ms, {"0": "000", "1": "110"}, table)


def z2_operad(m):
    """One colour, operations Z/2 in every sort, composition by addition."""
    a = presheaf(m, {"*": ["a"]})
    base = coloured_terminal(m, a)
    vals = {s: ("0", "1") for s in base.ma.m1.objects}
    return coloured_from_function(m, a, vals, {c: "0" for c in base.ma.m0.objects},
                                  lambda f, gs, o, os: str((int(o) + sum(map(int, os))) % 2), name="Z2")


def pushout_instances():
    """(label, attachment, u is an equivalence, extra targets)."""
    k = terminal()
    k1 = k.ident["*"]
    out = []
    m = nonsym(2)
    a = presheaf(m, {"*": ["a"]})
    for name, co in (("unit", coloured_unit(m, a)), ("terminal", coloured_terminal(m, a))):
        one = presheaf(m, {"*": ["x"]})
        unit = {("*", "x"): {k1: co.unit("*", "a")}}
        out.append((f"arrow out of old, {name}",
                    Attachment(co, one, Functor(k, arrow(), {"*": "a"}, {k1: "id_a"}), {("*", "x"): "a"}, unit),
                    False, []))
        out.append((f"arrow into old, {name}",
                    Attachment(co, one, Functor(k, arrow(), {"*": "b"}, {k1: "id_b"}), {("*", "x"): "a"}, unit),
                    False, []))
        out.append((f"no new colours, {name}",
                    Attachment(co, presheaf(m, {"*": []}), Functor(k, arrow(), {"*": "a"}, {k1: "id_a"}), {}, {}),
                    True, []))
        out.append((f"two isomorphic copies, {name}",
                    Attachment(co, presheaf(m, {"*": ["x", "y"]}), Functor(k, walking_iso(), {"*": "0"}, {k1: "id_0"}),
                               {("*", v): "a" for v in "xy"}, {("*", v): {k1: co.unit("*", "a")} for v in "xy"}),
                    True, []))
    z = from_monoid(["0", "1"], lambda x, y: str((int(x) + int(y)) % 2), "0")
    co = z2_operad(m)
    out.append(("Z2 automorphisms",
                Attachment(co, presheaf(m, {"*": ["x"]}), Functor(z, _groupoid_z2(), {"*": "0"}, {"0": "000", "1": "001"}),
                           {("*", "x"): "a"}, {("*", "x"): {"0": "0", "1": "1"}}),
                True, [co]))
    ms = sigma_star(2)
    co = coloured_terminal(ms, presheaf(ms, {"*": ["a"]}))
    one = presheaf(ms, {"*": ["x"]})
    unit = {("*", "x"): {k1: co.unit("*", "a")}}
    out.append(("symmetric, isomorphic copy",
                Attachment(co, one, Functor(k, walking_iso(), {"*": "0"}, {k1: "id_0"}), {("*", "x"): "a"}, unit),
                True, []))
    out.append(("symmetric, arrow out of old",
                Attachment(co, one, Functor(k, arrow(), {"*": "a"}, {k1: "id_a"}), {("*", "x"): "a"}, unit),
                False, []))
    return out


def pushout_targets(res, extra=()):
    m = res.attachment.co.m
    return [res.operad, coloured_terminal(m, res.attachment.co.colours), two_colours(m, coloured_unary),
            two_colours(m, coloured_unit)] + list(extra)
