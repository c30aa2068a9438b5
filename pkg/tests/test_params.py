import math

import pytest
from hypothesis import given, strategies as st

from qratchet.params import (ANTI_RESONANCE, MAIN_RESONANCE, ParameterError, PhysicalParams,
                             ResonanceOrder, ScaledParams, infer_resonance, rescale, wrap_angle)


def test_rescale_identity_at_unit_delay():
    s = rescale(PhysicalParams(T=4 * math.pi, eta=1.0, K=3.0, L=1.0, hbar=1.0))
    assert (s.k_tilde, s.l_tilde, s.hbar_tilde) == (3.0, 1.0, 1.0)
    assert s.resonance == MAIN_RESONANCE


def test_rescale_half_delay_second_order():
    s = rescale(PhysicalParams(T=8 * math.pi, eta=0.5, K=6.0, L=2.0, hbar=1.0))
    assert (s.k_tilde, s.l_tilde, s.hbar_tilde) == (3.0, 1.0, 0.5)
    assert s.resonance.ratio == 2


def test_rescale_direct_substitution():
    s = rescale(PhysicalParams(T=4 * math.pi, eta=0.25, K=12.0, L=4.0, hbar=4.0))
    assert (s.k_tilde, s.l_tilde, s.hbar_tilde) == (3.0, 1.0, 1.0)
    assert s.resonance == ResonanceOrder(4, 1)


def test_rescale_rejects_off_resonance():
    p = PhysicalParams(T=4 * math.pi * (1 + 1e-9), eta=1.0, K=1.0, L=1.0, hbar=1.0)
    with pytest.raises(ParameterError):
        rescale(p, MAIN_RESONANCE)


def test_rescale_declared_resonance_mismatch():
    p = PhysicalParams(T=2 * math.pi, eta=0.5, K=1.0, L=1.0, hbar=1.0)
    assert rescale(p, ANTI_RESONANCE).resonance == ANTI_RESONANCE
    with pytest.raises(ParameterError):
        rescale(p, MAIN_RESONANCE)


@given(c=st.floats(0.2, 5.0), eta=st.floats(0.05, 0.9), k=st.floats(0, 10), l=st.floats(0, 10))
def test_rescale_homogeneous(c, eta, k, l):
    base = PhysicalParams(T=4 * math.pi, eta=eta, K=k, L=l, hbar=1.0)
    scaled = PhysicalParams(T=4 * math.pi * c, eta=eta * c, K=k / c, L=l / c, hbar=1.0 / c)
    a, b = rescale(base), rescale(scaled)
    assert b.k_tilde == pytest.approx(a.k_tilde, rel=1e-14, abs=1e-300)
    assert b.l_tilde == pytest.approx(a.l_tilde, rel=1e-14, abs=1e-300)
    assert b.hbar_tilde == pytest.approx(a.hbar_tilde, rel=1e-14)
    assert b.resonance == a.resonance


@pytest.mark.parametrize("kw,key", [
    (dict(T=0, eta=0.1, K=1, L=1, hbar=1), "T"),
    (dict(T=1, eta=1.0, K=1, L=1, hbar=1), "eta"),
    (dict(T=1, eta=0.5, K=-1, L=1, hbar=1), "K"),
    (dict(T=1, eta=0.5, K=1, L=-1, hbar=1), "L"),
    (dict(T=1, eta=0.5, K=1, L=1, hbar=0), "hbar"),
])
def test_physical_invariants(kw, key):
    with pytest.raises(ParameterError) as err:
        PhysicalParams(**kw)
    assert err.value.key == key


def test_scaled_ranges():
    ScaledParams(0.0, 100.0, 0.01)
    with pytest.raises(ParameterError, match="hbar_tilde"):
        ScaledParams(1.0, 1.0, -1.0)
    with pytest.raises(ParameterError, match="k_tilde"):
        ScaledParams(101.0, 1.0, 1.0)


def test_resonance_coprime():
    assert ResonanceOrder(1, 2).t_hbar == pytest.approx(2 * math.pi)
    with pytest.raises(ParameterError):
        ResonanceOrder(2, 4)
    with pytest.raises(ParameterError):
        ResonanceOrder(0, 1)


def test_infer_resonance():
    assert infer_resonance(2 * math.pi) == ANTI_RESONANCE
    assert infer_resonance(4 * math.pi * 3 / 5) == ResonanceOrder(3, 5)


def test_wrap_angle():
    assert wrap_angle(math.pi) == -math.pi
    assert wrap_angle(0.5) == 0.5
    assert wrap_angle(-3 * math.pi / 2) == pytest.approx(math.pi / 2)
