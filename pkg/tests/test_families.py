import math

import numpy as np
import pytest

from curvcheck.cdfunctions import NuBased, PowerType
from curvcheck.errors import BadParams, TruncationInsufficient
from curvcheck.families import (
    hypercube_eta_maps,
    make_example,
    poisson_test_function,
)
from curvcheck.kernels import nu


def test_two_point_certificate():
    res = make_example("two_point", {"a": 1, "b": 2})
    cert = res.certificate
    assert cert.kappa == 0.0
    F = cert.cd_function
    assert isinstance(F, NuBased)
    assert F.descriptor == "nu:1.5,0.5,scale=2"
    r = 1.7
    assert float(F.value(np.array([r]))[0]) == pytest.approx(
        nu(1.5, 0.5, -r / 2.0), rel=1e-14)


def test_two_point_swapped_rates_same_certificate():
    f12 = make_example("two_point", {"a": 1, "b": 2}).certificate.cd_function
    f21 = make_example("two_point", {"a": 2, "b": 1}).certificate.cd_function
    assert f12.descriptor == f21.descriptor


def test_complete_certificate():
    res = make_example("complete", {"n": 3, "alpha": 0.25})
    assert res.certificate.kappa == pytest.approx(math.sqrt(3.0))
    F = res.certificate.cd_function
    assert isinstance(F, PowerType)
    assert F.n == pytest.approx(12.0)
    assert F.delta == 1.0
    assert res.chain.n == 3
    assert np.allclose(res.chain.pi, 1.0 / 3.0)


def test_complete_default_alpha():
    res = make_example("complete", {"n": 5})
    assert res.certificate.kappa == pytest.approx(math.sqrt(2 * 5 * 0.5))


def test_weighted_complete_reduces_to_complete():
    wc = make_example("weighted_complete", {"l": [1, 1, 1], "alpha": 0.25})
    co = make_example("complete", {"n": 3, "alpha": 0.25})
    assert wc.certificate.kappa == pytest.approx(co.certificate.kappa)
    r = np.linspace(0.1, 5.0, 9)
    assert np.allclose(wc.certificate.cd_function.value(r),
                       co.certificate.cd_function.value(r), rtol=1e-12)
    assert np.array_equal(wc.chain.rates, co.chain.rates)


def test_weighted_complete_general():
    l = [1.0, 2.0, 3.0]
    res = make_example("weighted_complete", {"l": l, "alpha": 0.25, "delta": 1})
    # kappa = sqrt(2 |l|_1 (l_min - 2 alpha))
    assert res.certificate.kappa == pytest.approx(math.sqrt(2 * 6 * 0.5))
    # rates: k(x, y) = l(y)
    K = res.chain.rates
    assert K[0, 1] == 2.0 and K[0, 2] == 3.0 and K[1, 0] == 1.0
    F = res.certificate.cd_function
    # F(r) = alpha r^2 / |l|_1 for delta = 1
    assert float(F.value(np.array([2.0]))[0]) == pytest.approx(0.25 * 4.0 / 6.0)


def test_hypercube_certificate_and_geometry():
    res = make_example("hypercube", {"d": 3})
    assert res.certificate.kappa == 2.0
    assert res.certificate.cd_function.descriptor == "nu:2,5,scale=3"
    chain = res.chain
    assert chain.n == 8
    assert np.allclose(chain.pi, 1.0 / 8.0)
    assert np.all(chain.rates.sum(axis=1) == 3.0)
    # edges connect states at hamming distance exactly 1
    for i, si in enumerate(chain.states):
        for j, sj in enumerate(chain.states):
            ham = sum(a != b for a, b in zip(si, sj))
            assert (chain.rates[i, j] > 0) == (ham == 1)


def test_birth_death_poisson_shortcut():
    res = make_example("birth_death", {"lam": 1.0, "cutoff": 5})
    assert res.certificate is None
    assert "no certificate" in res.notes
    pi = res.chain.pi
    expected = np.array([1.0 / math.factorial(x) for x in range(6)])
    expected /= expected.sum()
    assert np.allclose(pi, expected, rtol=1e-12)


def test_birth_death_explicit_lists():
    res = make_example("birth_death",
                       {"a": [1.0, 2.0, 3.0], "b": [0.0, 1.0, 1.0, 2.0],
                        "cutoff": 3})
    K = res.chain.rates
    assert K[0, 1] == 1.0 and K[1, 2] == 2.0 and K[2, 3] == 3.0
    assert K[1, 0] == 1.0 and K[3, 2] == 2.0


@pytest.mark.parametrize("family,params", [
    ("complete", {"n": 1}),
    ("complete", {"n": 3, "alpha": 0.5}),
    ("complete", {"n": 3, "alpha": 0.0}),
    ("hypercube", {"d": 0}),
    ("two_point", {"a": 0.0, "b": 1.0}),
    ("weighted_complete", {"l": [1.0, 2.0], "alpha": 0.6}),
    ("weighted_complete", {"l": [1.0]}),
    ("weighted_complete", {"l": [1.0, -2.0]}),
    ("birth_death", {"lam": 1.0}),
    ("no_such_family", {}),
])
def test_bad_params_rejected(family, params):
    with pytest.raises(BadParams):
        make_example(family, params)


def test_family_tag_recorded():
    res = make_example("hypercube", {"d": 2})
    assert res.chain.meta["family"] == "hypercube"


def test_poisson_test_function_k0_is_constant():
    chain, f, mass = poisson_test_function(1.0, 0.0, 30)
    assert np.max(np.abs(f - 1.0)) < 1e-8
    assert mass == pytest.approx(1.0, abs=1e-8)


def test_poisson_test_function_normalization():
    chain, f, mass = poisson_test_function(1.0, 2.0, 40)
    assert float(f @ chain.pi) == pytest.approx(1.0, rel=1e-12)
    assert mass == pytest.approx(1.0, abs=1e-8)


def test_poisson_test_function_entropy_closed_form():
    chain, f, _ = poisson_test_function(1.0, 2.0, 40)
    ent = float(np.sum(f * np.log(f) * chain.pi))
    # lam (k e^k - e^k + 1) at lam=1, k=2
    assert ent == pytest.approx(np.e**2 + 1.0, rel=1e-6)


def test_poisson_test_function_truncation_guard():
    with pytest.raises(TruncationInsufficient):
        poisson_test_function(1.0, 5.0, 60)


def test_eta_maps_d1():
    eta = hypercube_eta_maps(1)
    assert eta.shape == (1, 2)
    assert list(eta[0]) == [1, 0]


def test_eta_maps_d3_structure():
    eta = hypercube_eta_maps(3)
    assert eta.shape == (3, 8)
    chain = make_example("hypercube", {"d": 3}).chain
    for i in range(3):
        # involution and neighbor-valued
        assert np.all(eta[i][eta[i]] == np.arange(8))
        for u in range(8):
            assert chain.rates[u, eta[i, u]] > 0
    # distinct directions disagree everywhere
    for i in range(3):
        for j in range(i + 1, 3):
            assert np.all(eta[i] != eta[j])
