from __future__ import annotations

import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from catalab import affine_sat, encoding
from catalab.encoding import EMPTY, Bits, Codeword, Substrate
from catalab.structures import CacheTable


def gamma_len(k):
    # independent oracle: Elias gamma of k+1
    return 2 * int(math.floor(math.log2(k + 1))) + 1


# --- integers ----------------------------------------------------------------


def test_uint_zero_is_short():
    assert len(encoding.encode_uint(0)) <= 3


def test_uint_round_trip_100():
    cw = encoding.encode_uint(100)
    assert encoding.decode_uint(cw) == (100, len(cw))


def test_uint_lengths_bounded_and_monotone():
    prev = 0
    for k in range(1 << 16):
        n = encoding.uint_len(k)
        assert n == len(encoding.encode_uint(k).bits)
        assert n <= 2 * math.floor(math.log2(k + 1)) + 3
        assert n >= prev
        prev = n


@given(st.integers(0, 1 << 80))
def test_uint_round_trip(k):
    cw = encoding.encode_uint(k)
    assert len(cw) == gamma_len(k)
    assert encoding.decode_uint(cw.bits + "1011") == (k, len(cw))


def test_uint_rejects_negative():
    with pytest.raises(ValueError):
        encoding.encode_uint(-1)


# --- object codecs -------------------------------------------------------------


def _random_objects(kind, count, seed):
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        n = rng.randint(1, 12)
        d = rng.randint(0, n)
        s = rng.getrandbits(32)
        if kind == "uint":
            out.append(rng.getrandbits(rng.randint(0, 40)))
        elif kind == "bits":
            out.append(Bits("".join(rng.choice("01") for _ in range(rng.randint(0, 24)))))
        elif kind == "subspace":
            out.append(affine_sat.random_subspace(n, d, s))
        elif kind == "samples":
            out.append(affine_sat.sample_points(affine_sat.random_subspace(n, d, s), rng.randint(0, 5), s))
        elif kind == "instance":
            out.append(affine_sat.make_instance(affine_sat.random_subspace(n, d, s), s))
        elif kind == "substrate":
            v = affine_sat.random_subspace(n, d, s)
            out.append(Substrate(tuple([v, Bits("01")][: rng.randint(0, 2)])))
        elif kind == "cache":
            v = affine_sat.random_subspace(min(n, 6), min(d, 3), s)
            out.append(affine_sat.build_cache(affine_sat.fresh_instances(v, rng.randint(0, 2), s)))
    return out


KINDS = ["uint", "bits", "subspace", "samples", "instance", "substrate", "cache"]


@pytest.mark.parametrize("kind", KINDS)
def test_round_trip(kind):
    for x in _random_objects(kind, 60, 7):
        cw = encoding.encode(x)
        y, used = encoding.decode(cw)
        assert used == len(cw)
        assert y == x
        assert encoding.khat(x).bits == len(cw)


@pytest.mark.parametrize("kind", KINDS)
def test_prefix_free_on_random_pairs(kind):
    objs = _random_objects(kind, 150, 11)
    words = [encoding.encode(x).bits for x in objs]
    rng = random.Random(3)
    for _ in range(10_000):
        a, b = rng.choice(words), rng.choice(words)
        if a != b:
            assert not b.startswith(a) and not a.startswith(b)


def test_codeword_report_round_trip():
    for x in _random_objects("subspace", 20, 5) + [Bits("")]:
        cw = encoding.encode(x)
        text = cw.to_report()
        sid, _, ln = text.split(":")
        assert int(sid) == cw.scheme_id and int(ln) == len(cw)
        assert Codeword.from_report(text) == cw


def test_no_codec():
    with pytest.raises(encoding.NoCodecError):
        encoding.khat(object())


# --- complexity estimates ---------------------------------------------------


def test_khat_class_descriptor_8_3():
    v = affine_sat.random_subspace(8, 3, 0)
    assert encoding.khat(v).bits == 32 + gamma_len(8) + gamma_len(3)


def test_khat_class_descriptor_100_10():
    v = affine_sat.random_subspace(100, 10, 0)
    assert encoding.khat(v).bits == 1100 + gamma_len(100) + gamma_len(10)


def test_khat_empty_bits_is_header_only():
    assert encoding.khat(EMPTY).bits == gamma_len(0)


def test_cond_given_full_substrate_is_header_only():
    v = affine_sat.random_subspace(100, 10, 2)
    est = encoding.khat_cond(v, Substrate((v,)))
    assert est.kind == "conditional"
    assert est.bits <= encoding.default_header_overhead(100)


def test_cond_given_empty_equals_unconditional():
    v = affine_sat.random_subspace(100, 10, 2)
    for cond in (EMPTY, Substrate(()), None):
        est = encoding.khat_cond(v, cond)
        assert est.bits == encoding.khat(v).bits
        assert est.fallback


def test_cond_given_five_samples_is_hull_residual():
    v = affine_sat.random_subspace(100, 10, 3)
    s = affine_sat.sample_points(v, 5, 9)
    r = len(encoding.gf2.affine_hull(list(s.points))[1])
    assert r == 4  # generic at this seed
    bits = encoding.khat_cond(v, s).bits
    assert 100 * (10 - r) <= bits <= 100 * (10 - r) + encoding.default_header_overhead(100)


def test_cond_decodes_back():
    v = affine_sat.random_subspace(16, 6, 1)
    w = affine_sat.random_superspace(v, 4, 2)
    for cond in (Substrate((v,)), w, affine_sat.sample_points(v, 3, 1), Substrate((w, Bits("1")))):
        cw, est = encoding.encode_cond(v, cond)
        assert len(cw) == est.bits
        assert encoding.decode_conditional(cw, cond, type(v)) == v


def test_bits_patch_round_trip():
    a, b = Bits("0" * 40), Bits("0" * 17 + "1" + "0" * 22)
    cw, _ = encoding.encode_cond(a, b)
    assert encoding.decode_conditional(cw, b, Bits) == a


def test_mutual_info_examples():
    v = affine_sat.random_subspace(100, 10, 4)
    ho = encoding.default_header_overhead(100)
    assert encoding.mutual_info(v, EMPTY).bits == 0
    mu = encoding.mutual_info(v, Substrate((v,))).bits
    assert 1100 - ho <= mu <= 1100 + ho
    s = affine_sat.sample_points(v, 11, 5)
    if len(encoding.gf2.affine_hull(list(s.points))[1]) == 10:
        assert encoding.mutual_info(v, s).bits >= encoding.khat(v).bits - ho


subspaces = st.builds(
    lambda n, dfrac, seed: affine_sat.random_subspace(n, int(dfrac * n), seed),
    st.integers(1, 24),
    st.floats(0, 1),
    st.integers(0, 10_000),
)


@settings(max_examples=60, deadline=None)
@given(subspaces, subspaces)
def test_conditional_never_much_worse(x, y):
    ho = encoding.default_header_overhead(max(x.n, y.n))
    for cond in (y, Substrate((y,)), affine_sat.sample_points(y, 3, 0)):
        assert encoding.khat_cond(x, cond).bits <= encoding.khat(x).bits + ho


@settings(max_examples=60, deadline=None)
@given(subspaces, subspaces, st.integers(0, 5))
def test_refinement_monotone(x, extra, m):
    ho = encoding.default_header_overhead(x.n)
    desc1 = Substrate((affine_sat.sample_points(x, m, 1),))
    desc2 = desc1.extend(extra)
    assert encoding.khat_cond(x, desc2).bits <= encoding.khat_cond(x, desc1).bits + ho


@settings(max_examples=60, deadline=None)
@given(subspaces)
def test_self_information(x):
    ho = encoding.default_header_overhead(x.n)
    assert encoding.mutual_info(x, x).bits >= encoding.khat(x).bits - ho


def test_cache_conditional_uses_stored_answers():
    v = affine_sat.random_subspace(12, 4, 1)
    cache = affine_sat.build_cache(affine_sat.fresh_instances(v, 2, 0))
    assert isinstance(cache, CacheTable)
    assert encoding.khat_cond(v, cache).bits < encoding.khat(v).bits


def test_substrate_prefix_replay():
    v = affine_sat.random_subspace(2, 1, 0)
    w = affine_sat.random_subspace(2, 2, 0)
    coarse, fine = Substrate((w,)), Substrate((w, v))
    cw, est = encoding.encode_cond(coarse, fine)
    assert est.method == "substrate-prefix"
    assert est.bits <= encoding.default_header_overhead(2)
    assert encoding.decode_conditional(cw, fine, Substrate) == coarse
