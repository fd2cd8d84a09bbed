import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gsprecode import (
    GramDecomposition, MultCounter, ZoneSpec, cholesky_solve, corollary1_check, realify,
    zone_boundaries, zone_initial, zone_spec_for,
)
from gsprecode.errors import InvalidArgumentError
from gsprecode.modem import ConstellationSpec, qam_modulate
from gsprecode.zone import default_zones

from conftest import channel


def qam_symbols(K, seed, scale=1.0, T=None):
    rng = np.random.default_rng(seed)
    n = K * (T or 1)
    s = qam_modulate(rng.integers(0, 2, 6 * n), ConstellationSpec(64)) * scale
    return s if T is None else s.reshape(K, T)


def test_realify_examples():
    exp = realify(np.array([[2.0]]), np.array([1 + 1j]))
    np.testing.assert_array_equal(exp.W_R, 2 * np.eye(2))
    np.testing.assert_array_equal(exp.s_R, [1, 1])


def test_realify_equivalent_system(massive):
    _, G = massive
    s = qam_symbols(16, 0)
    exp = realify(G.W, s)
    np.testing.assert_allclose(exp.W_R, exp.W_R.T)
    assert np.all(np.linalg.eigvalsh(exp.W_R) > 0)
    xr = np.linalg.solve(exp.W_R, exp.s_R)
    np.testing.assert_allclose(xr[:16] + 1j * xr[16:], cholesky_solve(G, s), atol=1e-10)


def test_zone_boundaries():
    gamma = 256 * math.sqrt(42)
    np.testing.assert_allclose(zone_boundaries(ZoneSpec(4, 8, gamma)), [4 / gamma])
    assert zone_boundaries(ZoneSpec(2, 8, gamma)).size == 0
    np.testing.assert_allclose(zone_boundaries(ZoneSpec(8, 8, gamma)), np.array([2, 4, 6]) / gamma)


def test_zone_spec_validation():
    with pytest.raises(InvalidArgumentError):
        ZoneSpec(3, 8, 1.0)
    with pytest.raises(InvalidArgumentError):
        ZoneSpec(4, 6, 1.0)
    with pytest.raises(InvalidArgumentError):
        ZoneSpec(4, 8, 0.0)
    assert default_zones(64) == 4 and default_zones(16) == 2
    spec = zone_spec_for(256, 64)
    assert spec.gamma == pytest.approx(256 * math.sqrt(42))
    assert spec.levels == 8


def test_zero_symbols_give_zero_init(massive):
    _, G = massive
    init = zone_initial(realify(G.W, np.zeros(16)), zone_spec_for(256, 64))
    np.testing.assert_array_equal(init, 0)


@pytest.mark.parametrize("zones", [2, 4, 8])
def test_ideal_gram_lands_in_symbol_zone(zones):
    N, K = 256, 16
    spec = zone_spec_for(N, 64, zones)
    s = ConstellationSpec(64).points()[: 4 * K : 4][:K]
    init = zone_initial(realify(N * np.eye(K), s), spec)
    target = realify(np.eye(K), s).s_R / N
    got = realify(np.eye(K), init).s_R
    edges = np.concatenate([[0.0], zone_boundaries(spec), [np.inf]])
    zone_of = lambda v: np.searchsorted(edges, np.abs(v), side="left") - 1
    np.testing.assert_array_equal(np.sign(got), np.sign(target))
    np.testing.assert_array_equal(zone_of(got), zone_of(target))
    # centre of its zone
    w = spec.width
    np.testing.assert_allclose(np.abs(got), (zone_of(got) + 0.5) * w)


def test_sign_follows_symbols(massive):
    _, G = massive
    s = qam_symbols(16, 1, 0.25)
    init = zone_initial(realify(G.W, s), zone_spec_for(256, 64, 4, 0.25))
    np.testing.assert_array_equal(np.sign(realify(G.W, init).s_R), np.sign(realify(G.W, s).s_R))


def test_shared_vector_trick_matches_naive(massive):
    _, G = massive
    s = qam_symbols(16, 2, 0.25)
    exp = realify(G.W, s)
    spec = zone_spec_for(256, 64, 8, 0.25)
    init = zone_initial(exp, spec)
    # naive: g = s_R - W_R @ (z, ..., z) per boundary
    z = zone_boundaries(spec)
    sR = exp.s_R
    above = sum((sR - exp.W_R @ np.full(32, zz)) > 0 for zz in z)
    below = sum((sR + exp.W_R @ np.full(32, zz)) < 0 for zz in z)
    ref = np.where(sR > 0, (2 * above + 1) * spec.width / 2, -(2 * below + 1) * spec.width / 2)
    np.testing.assert_allclose(init, ref[:16] + 1j * ref[16:])


@pytest.mark.parametrize("zones", [2, 4, 6, 8])
def test_boundary_cost(massive, zones):
    _, G = massive
    c = MultCounter()
    zone_initial(realify(G.W, qam_symbols(16, 3)), zone_spec_for(256, 64, zones), counter=c)
    assert c.real_mults == (zones - 2) * 16
    assert c.complex_mults == 0


def test_block_symbols_match_columns(massive):
    _, G = massive
    S = qam_symbols(16, 4, 0.25, T=5)
    spec = zone_spec_for(256, 64, 4, 0.25)
    block = zone_initial(realify(G.W, S), spec)
    for j in range(5):
        np.testing.assert_allclose(block[:, j], zone_initial(realify(G.W, S[:, j]), spec))


def test_scale_consistency(massive):
    _, G = massive
    s = qam_symbols(16, 5)
    a = zone_initial(realify(G.W, s), zone_spec_for(256, 64))
    # doubling W along with N (so gamma doubles) halves the centres
    b = zone_initial(realify(2 * G.W, s), zone_spec_for(512, 64))
    np.testing.assert_allclose(b, a / 2)


def test_corollary1_ideal_and_reported():
    s = qam_symbols(8, 6)
    assert corollary1_check(realify(32 * np.eye(8), s)) == 1.0
    assert corollary1_check(realify(np.eye(2), np.zeros(2))) == 1.0
    _, G = channel(N=32, K=16)
    frac = corollary1_check(realify(G.W, qam_symbols(16, 7)))
    assert 0.0 <= frac <= 1.0


def test_zone_init_closer_than_zero():
    closer = 0
    for t in range(100):
        _, G = channel(seed=21, trial=t)
        s = qam_symbols(16, t, 0.25)
        exact = cholesky_solve(G, s)
        init = zone_initial(realify(G.W, s), zone_spec_for(256, 64, 4, 0.25))
        closer += np.linalg.norm(init - exact) < np.linalg.norm(exact)
    assert closer >= 95


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**31), st.sampled_from([2, 4, 8]))
def test_init_magnitudes_are_zone_centres(seed, zones):
    _, G = channel(N=64, K=4, seed=seed)
    s = qam_symbols(4, seed, 0.5)
    spec = zone_spec_for(64, 64, zones, 0.5)
    r = realify(G.W, zone_initial(realify(G.W, s), spec)).s_R
    k = np.abs(r) / spec.width - 0.5
    np.testing.assert_allclose(k, np.round(k), atol=1e-9)
    assert np.all(np.round(k) < zones // 2)
