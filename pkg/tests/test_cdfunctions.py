import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from curvcheck.cdfunctions import (
    CDFunction,
    NuBased,
    PowerType,
    Tabulated,
    parse_cd_descriptor,
)
from curvcheck.errors import BadParams
from curvcheck.kernels import nu


def test_power_type_values():
    F = PowerType(n=12.0, delta=1.0)
    assert F.value(np.array([2.0]))[0] == pytest.approx(4.0 / 12.0)
    assert F.derivative(np.array([2.0]))[0] == pytest.approx(4.0 / 12.0)
    assert F.growth_exponent() == 1.0


def test_power_type_trivial_extension():
    F = PowerType(n=4.0, delta=2.0)
    r = np.array([-3.0, -1e-12, 0.0, 1.0, 2.0])
    out = F.trivial(r)
    assert out[0] == 0.0 and out[1] == 0.0 and out[2] == 0.0
    assert out[3] == pytest.approx(0.25)
    assert out[4] == pytest.approx(2.0)


def test_power_type_rejects_bad_params():
    with pytest.raises(BadParams):
        PowerType(n=-1.0)
    with pytest.raises(BadParams):
        PowerType(n=3.0, delta=0.5)


def test_g_inverse_power_closed_form():
    F = PowerType(n=12.0, delta=1.0)
    # F(r)/r = r/12, so the inverse at s is 12 s
    assert F.g_inverse(0.5) == pytest.approx(6.0)
    F2 = PowerType(n=2.0, delta=3.0)
    s = 0.7
    r = F2.g_inverse(s)
    assert F2.value(np.array([r]))[0] / r == pytest.approx(s, rel=1e-12)


def test_g_inverse_generic_bracketing_agrees_with_closed_form():
    F = PowerType(n=5.0, delta=2.0)
    for s in [1e-3, 0.1, 1.0, 25.0]:
        generic = CDFunction.g_inverse(F, s)
        assert generic == pytest.approx(F.g_inverse(s), rel=1e-9)


@given(st.floats(1e-3, 1e3))
@settings(max_examples=40, deadline=None)
def test_g_inverse_roundtrip_nu(s):
    F = NuBased(out_scale=1.5, c=2.0, d=5.0, arg_scale=3.0)
    r = F.g_inverse(s)
    assert float(F.value(np.array([r]))[0]) / r == pytest.approx(s, rel=1e-9)


def test_nu_based_matches_kernel():
    F = NuBased(out_scale=1.0, c=1.5, d=0.5, arg_scale=2.0)
    r = np.linspace(0.1, 8.0, 17)
    assert np.allclose(F.value(r), nu(1.5, 0.5, -r / 2.0), rtol=1e-14)


def test_nu_based_derivative_fd():
    F = NuBased(out_scale=1.5, c=2.0, d=5.0, arg_scale=3.0)
    r = np.linspace(0.05, 10.0, 13)
    h = 1e-6
    fd = (F.value(r + h) - F.value(r - h)) / (2 * h)
    assert np.allclose(F.derivative(r), fd, rtol=1e-6, atol=1e-8)


def test_descriptor_power_roundtrip():
    F = parse_cd_descriptor("power:n=12,delta=1")
    assert isinstance(F, PowerType)
    assert F.n == 12.0 and F.delta == 1.0
    assert parse_cd_descriptor(F.descriptor).descriptor == F.descriptor


def test_descriptor_nu_default_out_scale():
    F = parse_cd_descriptor("nu:2,5,scale=3")
    assert isinstance(F, NuBased)
    assert F.arg_scale == 3.0
    assert F.out_scale == 1.5
    assert F.descriptor == "nu:2,5,scale=3"


def test_descriptor_nu_explicit_out():
    F = parse_cd_descriptor("nu:1.5,0.5,scale=2,out=7")
    assert F.out_scale == 7.0
    assert parse_cd_descriptor(F.descriptor).out_scale == 7.0


@pytest.mark.parametrize("bad", [
    "power:n=12;delta=1",
    "power:delta=1",
    "nu:2,scale=3",
    "nu:2,5,scale=3,bogus=1",
    "mystery:1,2",
    "noseparator",
])
def test_descriptor_rejects_malformed(bad):
    with pytest.raises(BadParams):
        parse_cd_descriptor(bad)


def test_tabulated_interpolates_power():
    grid = np.linspace(0.0, 10.0, 201)
    F = Tabulated(grid=grid, values=grid**2 / 3.0)
    r = np.array([0.5, 2.25, 7.7])
    assert np.allclose(F.value(r), r**2 / 3.0, rtol=1e-3)
    assert F.integrable_reciprocal_at_infinity() is None


def test_tabulated_prepends_origin():
    F = Tabulated(grid=np.array([1.0, 2.0]), values=np.array([1.0, 4.0]))
    assert float(F.value(np.array([0.0]))[0]) == 0.0


def test_validate_rejects_non_cd_shape():
    # F(r) = sqrt(r) has F(r)/r decreasing
    class Bad(CDFunction):
        descriptor = "bad"

        def value(self, r):
            return np.sqrt(np.asarray(r, dtype=float))

        def derivative(self, r):
            return 0.5 / np.sqrt(np.asarray(r, dtype=float))

    with pytest.raises(BadParams):
        Bad().validate()
