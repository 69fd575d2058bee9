"""Brute-force oracles, written without the library's algorithms.

Only the plain data of FinCategory, Functor and SetFunctor is used here, so
an agreement between an oracle and the library is evidence, not a tautology.
"""
import itertools
import random
from collections import Counter
from math import comb

from genop.fincat import FinCategory, Functor, SetFunctor, from_monoid, poset, pid


# -- small categories

def chain(n):
    names = [str(i) for i in range(n)]
    return poset(names, lambda a, b: int(a) <= int(b))


def cyclic_monoid(n):
    names = [str(i) for i in range(n)]
    return from_monoid(names, lambda a, b: str((int(a) + int(b)) % n), "0")


def idempotent_monoid():
    return from_monoid(["1", "e"], lambda a, b: "1" if a == b == "1" else "e", "1")


def random_poset(rng, n):
    names = [f"p{i}" for i in range(n)]
    rel = {(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < 0.5}
    changed = True
    while changed:
        changed = False
        for (i, j), (k, l) in itertools.product(list(rel), list(rel)):
            if j == k and (i, l) not in rel:
                rel.add((i, l))
                changed = True
    return poset(names, lambda a, b: a == b or (names.index(a), names.index(b)) in rel)


def arrow_category(c):
    """Arr(c): objects the morphisms of c, morphisms commuting squares, with
    the source and target projections."""
    obs = list(c.morphisms)
    ms, split = {}, {}
    for f in obs:
        for g in obs:
            for p in c.hom(c.src[f], c.src[g]):
                for q in c.hom(c.tgt[f], c.tgt[g]):
                    if c.table[g, p] == c.table[q, f]:
                        mid = pid(f, g, p, q)
                        ms[mid] = (f, g)
                        split[mid] = (p, q)
    table = {}
    for m1, (f, g) in ms.items():
        for m2, (g2, h) in ms.items():
            if g2 == g:
                p = c.table[split[m2][0], split[m1][0]]
                q = c.table[split[m2][1], split[m1][1]]
                table[m2, m1] = pid(f, h, p, q)
    ident = {f: pid(f, f, c.ident[c.src[f]], c.ident[c.tgt[f]]) for f in obs}
    arr = FinCategory(obs, ms, ident, table, name="Arr")
    s = Functor(arr, c, {f: c.src[f] for f in obs}, {m: split[m][0] for m in ms})
    t = Functor(arr, c, {f: c.tgt[f] for f in obs}, {m: split[m][1] for m in ms})
    return arr, s, t


def all_set_functors(c, sizes, cap=20000):
    """Every covariant functor c -> FinSet with |F(x)| = sizes[x] on range(sizes[x])."""
    sets = {x: list(range(sizes[x])) for x in c.objects}
    movable = [m for m in c.morphisms if m not in c.ident.values()]
    choices = [list(itertools.product(sets[c.tgt[m]], repeat=len(sets[c.src[m]]))) for m in movable]
    out = []
    for combo in itertools.product(*choices):
        maps = {c.ident[x]: {e: e for e in sets[x]} for x in c.objects}
        for m, img in zip(movable, combo):
            maps[m] = dict(zip(sets[c.src[m]], img))
        ok = all(maps[g][maps[f][e]] == maps[h][e]
                 for (g, f), h in c.table.items() for e in sets[c.src[f]])
        if ok:
            out.append(SetFunctor(c, sets, maps))
            if len(out) >= cap:
                break
    return out


def random_set_functor(c, rng, max_size=2):
    for _ in range(50):
        sizes = {x: rng.randint(0, max_size) for x in c.objects}
        fs = all_set_functors(c, sizes)
        if fs:
            return rng.choice(fs)
    return all_set_functors(c, {x: 1 for x in c.objects})[0]


# -- universal properties by exhaustion

def brute_nat(f, g):
    """All natural transformations f => g as dicts of component dicts."""
    c = f.dom
    obs = list(c.objects)
    comps = [[dict(zip(f.sets[x], img)) for img in itertools.product(g.sets[x], repeat=len(f.sets[x]))]
             for x in obs]
    out = []
    for choice in itertools.product(*comps):
        eta = dict(zip(obs, choice))
        if all(g.maps[m][eta[c.src[m]][e]] == eta[c.tgt[m]][f.maps[m][e]]
               for m in c.morphisms for e in f.sets[c.src[m]]):
            out.append(eta)
    return out


def count_cocones(f, target_size):
    """Cocones from f to the constant functor on a set of the given size."""
    t = range(target_size)
    c = f.dom
    obs = list(c.objects)
    comps = [list(itertools.product(t, repeat=len(f.sets[x]))) for x in obs]
    n = 0
    for choice in itertools.product(*comps):
        leg = {x: dict(zip(f.sets[x], img)) for x, img in zip(obs, choice)}
        if all(leg[c.tgt[m]][f.maps[m][e]] == leg[c.src[m]][e]
               for m in c.morphisms for e in f.sets[c.src[m]]):
            n += 1
    return n


def brute_limit_size(f):
    c = f.dom
    n = 0
    for fam in itertools.product(*(f.sets[x] for x in c.objects)):
        pt = dict(zip(c.objects, fam))
        if all(f.maps[m][pt[c.src[m]]] == pt[c.tgt[m]] for m in c.morphisms):
            n += 1
    return n


def agreeing_pairs(f, g):
    return [(x, y) for x in f.dom.objects for y in g.dom.objects if f.ob[x] == g.ob[y]]


# -- fibrations by lift enumeration

def lifts_ending_at(f, m, a):
    return [mt for mt in f.dom.morphisms if f.dom.tgt[mt] == a and f.mor[mt] == m]


def brute_is_cartesian(f, mt):
    c, d = f.dom, f.cod
    for h in c.morphisms:
        if c.tgt[h] != c.tgt[mt]:
            continue
        for k in d.morphisms:
            if d.src[k] != f.ob[c.src[h]] or d.tgt[k] != f.ob[c.src[mt]]:
                continue
            if (f.mor[mt], k) not in d.table or d.table[f.mor[mt], k] != f.mor[h]:
                continue
            fill = [kt for kt in c.morphisms if c.src[kt] == c.src[h] and c.tgt[kt] == c.src[mt]
                    and f.mor[kt] == k and c.table[mt, kt] == h]
            if len(fill) != 1:
                return False
    return True


def brute_right_fibration(f):
    c, d = f.dom, f.cod
    for a in c.objects:
        for m in d.morphisms:
            if d.tgt[m] == f.ob[a] and not lifts_ending_at(f, m, a):
                return False
    return all(brute_is_cartesian(f, mt) for mt in c.morphisms)


def brute_isofibration(f):
    c, d = f.dom, f.cod

    def iso(cat, m):
        return any(cat.src[n] == cat.tgt[m] and cat.tgt[n] == cat.src[m]
                   and cat.table[n, m] == cat.ident[cat.src[m]] and cat.table[m, n] == cat.ident[cat.tgt[m]]
                   for n in cat.morphisms)

    for a in c.objects:
        for m in d.morphisms:
            if d.src[m] == f.ob[a] and iso(d, m):
                if not any(c.src[mt] == a and f.mor[mt] == m and iso(c, mt) for mt in c.morphisms):
                    return False
    return True


# -- operads

def planar_binary_trees(n):
    """Planar binary trees with n leaves, built as nested tuples."""
    if n == 1:
        return ["|"]
    out = []
    for k in range(1, n):
        for left in planar_binary_trees(k):
            for right in planar_binary_trees(n - k):
                out.append((left, right))
    return out


def compositions(n, k):
    """Ordered tuples of k non-negative integers summing to n."""
    if k == 0:
        return [()] if n == 0 else []
    return [(i,) + rest for i in range(n + 1) for rest in compositions(n - i, k - 1)]


def direct_composite_sizes(s_sizes, t_sizes, bound):
    """|(S o T)(n)| = sum_k |S(k)| * sum_{n_1+...+n_k=n} prod |T(n_i)| over nonsym."""
    out = {}
    for n in range(bound + 1):
        total = 0
        for k in range(bound + 1):
            sk = s_sizes.get(k, 0)
            if not sk:
                continue
            for ns in compositions(n, k):
                p = 1
                for ni in ns:
                    p *= t_sizes.get(ni, 0)
                total += sk * p
        out[n] = total
    return out


def symmetric_composite_sizes(s, t, bound):
    """|(S o T)(n)| over Sigma_* as pi_0 of the comma category: triples
    (x in S(k), (y_i in T(n_i)), sigma in Sigma_n) modulo the block action,
    with S and T given as {k: (elements, action)} where action(perm, e) is
    the right action of a permutation tuple."""
    out = {}
    for n in range(bound + 1):
        items = []
        for k in range(bound + 1):
            for ns in compositions(n, k):
                for x in s[k][0] if k in s else ():
                    for ys in itertools.product(*(t[ni][0] if ni in t else () for ni in ns)):
                        for sigma in itertools.permutations(range(n)):
                            items.append((k, ns, x, ys, sigma))
        seen, classes = set(), 0
        for it in items:
            if it in seen:
                continue
            classes += 1
            stack = [it]
            seen.add(it)
            while stack:
                cur = stack.pop()
                for nxt in _block_moves(cur, s, t):
                    if nxt not in seen:
                        seen.add(nxt)
                        stack.append(nxt)
        out[n] = classes
    return out


def _block_moves(item, s, t):
    """Generators of the groupoid: permute the k blocks, or act inside one block."""
    k, ns, x, ys, sigma = item
    starts = [sum(ns[:i]) for i in range(k)]
    for i in range(k - 1):
        # swap blocks i and i+1
        p = list(range(k))
        p[i], p[i + 1] = p[i + 1], p[i]
        new_ns = tuple(ns[p[j]] for j in range(k))
        new_x = s[k][1](tuple(p), x)
        new_ys = tuple(ys[p[j]] for j in range(k))
        old_pos = []
        for j in range(k):
            b = p[j]
            old_pos.extend(range(starts[b], starts[b] + ns[b]))
        new_sigma = tuple(sigma[q] for q in old_pos)
        yield (k, new_ns, new_x, new_ys, new_sigma)
    for i in range(k):
        ni = ns[i]
        for q in _adjacent_swaps(ni):
            new_ys = ys[:i] + (t[ni][1](q, ys[i]),) + ys[i + 1:]
            new_sigma = list(sigma)
            for j in range(ni):
                new_sigma[starts[i] + j] = sigma[starts[i] + q[j]]
            yield (k, ns, x, new_ys, tuple(new_sigma))


def _adjacent_swaps(n):
    for i in range(n - 1):
        p = list(range(n))
        p[i], p[i + 1] = p[i + 1], p[i]
        yield tuple(p)


# -- transfer systems on subgroup lattices of cyclic groups

def cyclic_transfer_system_count(n):
    """Transfer systems on C_n: partial orders R refining inclusion of subgroups
    (identified with divisors of n) with K R H and L <= H implying (K meet L) R L."""
    divs = [d for d in range(1, n + 1) if n % d == 0]

    def gcd(a, b):
        while b:
            a, b = b, a % b
        return a

    cand = [(k, h) for k in divs for h in divs if k != h and h % k == 0]
    count = 0
    for bits in itertools.product((False, True), repeat=len(cand)):
        rel = {p for p, b in zip(cand, bits) if b} | {(d, d) for d in divs}
        if any((a, c) not in rel for (a, b) in rel for (b2, c) in rel if b == b2):
            continue
        if any((gcd(k, l), l) not in rel for (k, h) in rel for l in divs if h % l == 0):
            continue
        count += 1
    return count


# -- G-sets for C_2, used to count Sigma_(O,T) for the orbit category of C_2

C2_ORBITS = {"free": (0, 1), "point": (0,)}


def _act(orbit, x):
    return 1 - x if orbit == "free" else x


def c2_maps(a, b):
    """Equivariant maps between C_2-orbits, as tuples of images."""
    return [img for img in itertools.product(C2_ORBITS[b], repeat=len(C2_ORBITS[a]))
            if all(img[_act(a, x)] == _act(b, img[x]) for x in C2_ORBITS[a])]


def _is_iso_map(a, b, img):
    return a == b and len(set(img)) == len(img)


def c2_sigma_counts(complete, bound):
    """(objects, morphisms) of Sigma_(O_C2, T) up to arity bound, by G-set enumeration.

    complete=True takes T = all maps, otherwise T = isomorphisms.  A morphism is
    a pullback square from f' : A' -> b' to f : A -> b.
    """
    def in_t(a, b, img):
        return complete or _is_iso_map(a, b, img)

    mults = []
    for b in C2_ORBITS:
        for n in range(bound + 1):
            for a_seq in itertools.product(C2_ORBITS, repeat=n):
                for comps in itertools.product(*(c2_maps(a, b) for a in a_seq)):
                    if all(in_t(a, b, m) for a, m in zip(a_seq, comps)):
                        mults.append((a_seq, b, comps))

    def points(a_seq):
        return [(i, x) for i, a in enumerate(a_seq) for x in C2_ORBITS[a]]

    morphisms = 0
    for (a2, b2, f2) in mults:
        for (a1, b1, f1) in mults:
            if len(a2) > bound or len(a1) > bound:
                continue
            for k in c2_maps(b2, b1):
                for alpha in itertools.product(range(len(a1)), repeat=len(a2)):
                    for hs in itertools.product(*(c2_maps(a2[i], a1[alpha[i]]) for i in range(len(a2)))):
                        if _pullback_square(a2, f2, a1, f1, k, alpha, hs):
                            morphisms += 1
    return len(mults), morphisms


def _pullback_square(a2, f2, a1, f1, k, alpha, hs):
    def h(p):
        i, x = p
        return (alpha[i], hs[i][x])

    def f_top(p):
        i, x = p
        return f2[i][x]

    def f_bot(p):
        i, x = p
        return f1[i][x]

    src = [(i, x) for i, a in enumerate(a2) for x in C2_ORBITS[a]]
    tgt = [(i, x) for i, a in enumerate(a1) for x in C2_ORBITS[a]]
    if any(f_bot(h(p)) != k[f_top(p)] for p in src):
        return False
    b2_pts = range(len(k))
    pb = [(q, y) for q in tgt for y in b2_pts if f_bot(q) == k[y]]
    induced = Counter((h(p), f_top(p)) for p in src)
    return sorted(induced) == sorted(pb) and all(v == 1 for v in induced.values())


def catalan(n):
    return comb(2 * n, n) // (n + 1)


def rng_for(seed):
    return random.Random(seed)


def planar_trees(gen_sizes, n):
    """Planar trees with n leaves whose vertices are labelled by generators;
    gen_sizes[k] generators of arity k >= 2."""
    out = ["|"] if n == 1 else []
    for k, count in gen_sizes.items():
        for ns in compositions(n, k):
            if 0 in ns:
                continue
            for label in range(count):
                for kids in itertools.product(*(planar_trees(gen_sizes, x) for x in ns)):
                    out.append((k, label, kids))
    return out


def count_monoids(els):
    """Associative unital multiplications on els, counted by brute force."""
    n = 0
    pairs = [(a, b) for a in els for b in els]
    for vals in itertools.product(els, repeat=len(pairs)):
        mul = dict(zip(pairs, vals))
        if not any(all(mul[u, a] == a == mul[a, u] for a in els) for u in els):
            continue
        if all(mul[mul[a, b], c] == mul[a, mul[b, c]] for a in els for b in els for c in els):
            n += 1
    return n
