import pytest
from hypothesis import given, settings, strategies as st

from genop.fincat import CategoryError
from genop.fmulti import nonsym, sigma_star
from genop.operads.collections import (NonFiniteComposite, collection, collection_morphisms,
                                       compose_collections, conv_double, conv_unit, empty_collection,
                                       internal_hom, monoid_double, terminal_collection, unit_collection)

from corpus import (drop_nullary, natural_isomorphism, positive_collection, random_nonsym_pair,
                    random_symmetric_pair, small_nonsym_triple, summands_biject)
from oracles import direct_composite_sizes, rng_for, symmetric_composite_sizes

seeds = st.integers(min_value=0, max_value=10 ** 6)


# -- unit

def test_unit_over_nonsym():
    j = unit_collection(nonsym(3))
    assert j.sizes() == {"0": 0, "1": 1, "2": 0, "3": 0}


def test_unit_over_sigma_star():
    j = unit_collection(sigma_star(3))
    assert j.sizes() == {"0": 0, "1": 1, "2": 0, "3": 0}


# -- small worked examples

def test_binary_after_two_unaries():
    m = nonsym(4)
    s = collection(m, {"2": ["s"]})
    t = collection(m, {"1": ["t", "t'"]})
    st_ = compose_collections(s, t)
    assert st_.sizes()["2"] == 4
    assert sum(st_.sizes().values()) == 4


def test_symmetric_example():
    m = sigma_star(3)
    s = collection(m, {"2": ["s"]})
    t = collection(m, {"1": ["t"]})
    assert compose_collections(s, t).sizes()["2"] == 1


def test_nullary_at_bound_is_refused():
    m = nonsym(2)
    s = collection(m, {"2": ["s"]})
    t = collection(m, {"0": ["z"], "1": ["t"]})
    with pytest.raises(NonFiniteComposite):
        compose_collections(s, t)
    compose_collections(s, t, assume_supported=True)


def test_composite_reaching_past_the_bound_is_refused_under_nullaries():
    # S o T is zero at the bound but S(2) x T(2) x T(2) lives at arity 4
    m = nonsym(3)
    s = collection(m, {"2": ["s"]})
    t = collection(m, {"0": ["z"], "2": ["t"]})
    st_ = compose_collections(s, t, assume_supported=True)
    assert st_.sizes()["3"] == 0 and st_.reaches_beyond_bound()
    with pytest.raises(NonFiniteComposite):
        compose_collections(st_, t)
    assert not compose_collections(collection(m, {"1": ["a"]}), collection(m, {"1": ["b"]})).reaches_beyond_bound()


def test_mismatched_multicategories_are_refused():
    with pytest.raises(CategoryError):
        compose_collections(terminal_collection(nonsym(2)), terminal_collection(nonsym(2)))


# -- composition product oracles

@pytest.mark.parametrize("seed", range(60))
def test_nonsym_composite_is_the_direct_sum(seed):
    m, s, t, s_sizes, t_sizes = random_nonsym_pair(seed)
    comp = compose_collections(s, t)
    want = direct_composite_sizes(s_sizes, t_sizes, m.bound)
    assert {int(k): v for k, v in comp.sizes().items()} == want
    assert summands_biject(m, s, t, comp)


@pytest.mark.parametrize("seed", range(12))
def test_symmetric_composite_is_pi0_of_comma(seed):
    m, s, t, s_spec, t_spec = random_symmetric_pair(seed)
    comp = compose_collections(s, t)
    want = symmetric_composite_sizes(s_spec, t_spec, m.bound)
    assert {int(k): v for k, v in comp.sizes().items()} == want


# -- monoidal structure

@pytest.mark.parametrize("seed", range(10))
def test_unitors_nonsym(seed):
    m, s, t, _, _ = random_nonsym_pair(seed, bound=3)
    j = unit_collection(m)
    assert natural_isomorphism(compose_collections(j, s, assume_supported=True), s) is not None
    assert natural_isomorphism(compose_collections(s, j), s) is not None


@pytest.mark.parametrize("seed", range(6))
def test_unitors_symmetric(seed):
    m, s, t, _, _ = random_symmetric_pair(seed)
    j = unit_collection(m)
    assert natural_isomorphism(compose_collections(s, j), s) is not None
    assert natural_isomorphism(compose_collections(j, t, assume_supported=True), t) is not None


@pytest.mark.parametrize("seed", range(10))
def test_associator_nonsym(seed):
    rng = rng_for(seed)
    m = nonsym(3)
    s, t, u = (positive_collection(m, rng, tag) for tag in "stu")
    left = compose_collections(compose_collections(s, t), u)
    right = compose_collections(s, compose_collections(t, u))
    assert natural_isomorphism(left, right) is not None


@pytest.mark.parametrize("seed", range(4))
def test_associator_symmetric(seed):
    m, s, t, _, _ = random_symmetric_pair(seed)
    u = drop_nullary(random_symmetric_pair(seed + 1000)[2], m)
    left = compose_collections(compose_collections(s, t), u)
    right = compose_collections(s, compose_collections(t, u))
    assert natural_isomorphism(left, right) is not None


# -- internal hom

@pytest.mark.parametrize("seed", range(24))
def test_internal_hom_adjunction_counts(seed):
    m, s, t, u = small_nonsym_triple(seed)
    lhs = len(collection_morphisms(compose_collections(s, t), u))
    rhs = len(collection_morphisms(s, internal_hom(t, u)))
    assert lhs == rhs


def test_hom_from_unit_is_identity():
    m = nonsym(3)
    u = collection(m, {"0": ["z"], "1": ["a", "b"], "3": ["c"]})
    h = internal_hom(unit_collection(m), u)
    assert h.sizes() == u.sizes()


def test_hom_into_terminal_is_terminal():
    m = nonsym(3)
    t = collection(m, {"1": ["x"], "2": ["y"]})
    h = internal_hom(t, terminal_collection(m))
    assert all(n == 1 for n in h.sizes().values())


def test_hom_from_empty_is_terminal():
    m = nonsym(2)
    h = internal_hom(empty_collection(m), collection(m, {"1": ["a"]}))
    # y_g o 0 vanishes except at nullary g, where it is the point at arity 0
    assert h.sizes() == {"0": 0, "1": 1, "2": 1}


# -- convolution over a double category

def truncated_naturals(n):
    els = [str(i) for i in range(n + 1)]
    return monoid_double(els, lambda a, b: str(int(a) + int(b)) if int(a) + int(b) <= n else None, "0")


def cauchy(fs, gs, n):
    return {k: sum(fs.get(i, 0) * gs.get(k - i, 0) for i in range(k + 1)) for k in range(n + 1)}


def sizes_to_functor(d, sizes, tag):
    from genop.fincat import SetFunctor
    sets = {x: [f"{tag}{x}{i}" for i in range(sizes.get(int(x), 0))] for x in d.d1.objects}
    return SetFunctor(d.d1, sets, {f"id_{x}": {e: e for e in sets[x]} for x in d.d1.objects})


def test_convolution_example():
    d = truncated_naturals(3)
    f = sizes_to_functor(d, {1: 1}, "a")
    fg = conv_double(d, f, f)
    assert len(fg("2")) == 1


@given(st.dictionaries(st.integers(0, 3), st.integers(0, 2)), st.dictionaries(st.integers(0, 3), st.integers(0, 2)))
@settings(max_examples=25)
def test_convolution_is_the_cauchy_product(fs, gs):
    d = truncated_naturals(3)
    f, g = sizes_to_functor(d, fs, "a"), sizes_to_functor(d, gs, "b")
    got = {int(x): n for x, n in conv_double(d, f, g).sizes().items()}
    assert got == cauchy(fs, gs, 3)


def test_convolution_unit():
    d = truncated_naturals(3)
    f = sizes_to_functor(d, {0: 1, 2: 2}, "a")
    assert conv_double(d, conv_unit(d), f).sizes() == f.sizes()
    assert conv_double(d, f, conv_unit(d)).sizes() == f.sizes()
