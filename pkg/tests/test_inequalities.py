import numpy as np
import pytest

from conftest import path_chain, poisson_chain, two_point_chain
from curvcheck.errors import (
    BadParams,
    NonIntegrableGrowth,
    NonIntegrableTail,
    TruncationInsufficient,
    VanishingEntry,
)
from curvcheck.families import make_example
from curvcheck.growth import Linear, LogGrowth, PowerIntegral, growth_from_power_cd
from curvcheck.inequalities import (
    bounded_phi_entropy_check,
    ei_check,
    exp_integrability_check,
    fisher_lipschitz_check,
    lipschitz_seminorm,
    nash_check,
    poisson_sharpness,
    resistance_diameter,
    resistance_distance,
    ultracontractivity_check,
    unit_lipschitz,
)
from curvcheck.sampling import random_density, random_nonvanishing

K3_PHI = LogGrowth(n=12.0, kappa=np.sqrt(3.0))


@pytest.fixture
def k3():
    return make_example("complete", {"n": 3, "alpha": 0.25}).chain


def test_ei_constant_density(k3):
    report = ei_check(k3, np.ones(3), K3_PHI)
    assert report.passed
    assert report.params["plain_slack"] == pytest.approx(0.0, abs=1e-12)


def test_ei_k3_seeded_densities(k3):
    rng = np.random.default_rng(100)
    for _ in range(300):
        f = random_density(rng, k3.pi)
        report = ei_check(k3, f, K3_PHI)
        assert report.passed, report.witness
        assert report.params["plain_slack"] >= -1e-10


def test_ei_tangent_tightness(k3):
    # linearized slack at r = I(f) reproduces the plain slack
    rng = np.random.default_rng(101)
    for _ in range(50):
        f = random_density(rng, k3.pi)
        report = ei_check(k3, f, K3_PHI)
        assert report.params["tangent_slack"] == pytest.approx(
            report.params["plain_slack"], abs=1e-12)


def test_ei_non_normalized_variant(k3):
    rng = np.random.default_rng(102)
    f = np.exp(rng.normal(size=3)) * 3.7
    report = ei_check(k3, f, K3_PHI)
    assert report.params["plain_slack"] is None
    assert report.passed


def test_ei_log_growth_below_mlsi_line():
    phi = LogGrowth(n=5.0, kappa=2.0)
    grid = np.logspace(-4, 4, 100)
    assert np.all(phi.value(grid) <= grid / (2.0 * phi.kappa) + 1e-15)


def test_ei_failure_records_witness(k3):
    # a growth function far below the entropy scale must fail
    tiny = Linear(c=1e-6)
    f = np.array([3.0, 0.2, 0.2])
    f = f / float(f @ k3.pi)
    report = ei_check(k3, f, tiny)
    assert not report.passed
    assert report.witness is not None
    assert "input" in report.witness


def test_bounded_phi_entropy_check():
    res = make_example("weighted_complete",
                       {"l": [1.0, 1.0, 1.0, 1.0], "delta": 2.0})
    phi = growth_from_power_cd(res.certificate.cd_function.n,
                               res.certificate.kappa, 2.0)
    assert phi.bounded
    rng = np.random.default_rng(103)
    for _ in range(50):
        f = np.exp(rng.normal(size=4))
        report = bounded_phi_entropy_check(res.chain, f, phi)
        assert report.passed, report.witness
    with pytest.raises(BadParams):
        bounded_phi_entropy_check(res.chain, np.ones(4),
                                  LogGrowth(n=1.0, kappa=1.0))


def test_poisson_sharpness_pinned_k2():
    s = poisson_sharpness(1.0, 2.0, 40)
    assert s.entropy_closed == pytest.approx(np.exp(2.0) + 1.0, rel=1e-12)
    assert s.fisher_closed == pytest.approx(2.0 * (np.exp(2.0) - 1.0), rel=1e-12)
    assert s.entropy == pytest.approx(s.entropy_closed, rel=1e-8)
    assert s.fisher == pytest.approx(s.fisher_closed, rel=1e-8)
    assert s.ratio == pytest.approx(0.6565, abs=2e-4)


def test_poisson_sharpness_ratio_climbs():
    # generous cutoffs that still keep k*cutoff inside double range
    ratios = [poisson_sharpness(1.0, k, c).ratio
              for k, c in ((1.0, 60), (2.0, 80), (3.0, 120))]
    assert ratios[0] == pytest.approx(0.582, abs=2e-3)
    assert all(a < b for a, b in zip(ratios, ratios[1:]))
    assert all(r < 1 for r in ratios)
    # k = 5 is out of reach numerically: the tilted mean e^5*lam needs a
    # cutoff past 200 but exp(k*cutoff) then overflows; closed form only
    k = 5.0
    closed = (k * np.exp(k) - np.exp(k) + 1) / (k * (np.exp(k) - 1))
    assert closed == pytest.approx(0.8068, abs=2e-4)
    with pytest.raises(BadParams):
        poisson_sharpness(1.0, k, 300)


def test_poisson_sharpness_small_k_limit():
    s = poisson_sharpness(1.0, 1e-3, 30)
    assert s.ratio_closed == pytest.approx(0.5, abs=1e-3)
    with pytest.raises(BadParams):
        poisson_sharpness(1.0, 0.0, 30)
    with pytest.raises(TruncationInsufficient):
        poisson_sharpness(1.0, 5.0, 60)


def test_ultracontractivity_k3_seeded(k3):
    rng = np.random.default_rng(104)
    for t in (0.01, 0.1, 1.0):
        for _ in range(100):
            f = rng.normal(size=3)
            report = ultracontractivity_check(k3, f, K3_PHI, t=t)
            assert report.passed, (t, report.witness)


def test_ultracontractivity_constant_function(k3):
    report = ultracontractivity_check(k3, np.full(3, 1.7), K3_PHI, t=0.5)
    assert report.passed
    expected = 0.5 * 12.0 * np.log1p(1.0 / (2.0 * np.sqrt(3.0) * 0.5))
    assert report.slack[0] == pytest.approx(expected, rel=1e-10)


def test_ultracontractivity_long_time_jensen(k3):
    # bound tends to ||e^f||_1 and P_t f to the mean: Jensen in the limit
    rng = np.random.default_rng(105)
    f = rng.normal(size=3)
    report = ultracontractivity_check(k3, f, K3_PHI, t=500.0)
    mean = float(f @ k3.pi)
    l1 = float(np.log(np.exp(f) @ k3.pi))
    assert mean <= l1 + 1e-12
    assert report.slack[0] == pytest.approx(
        0.5 * 12.0 * np.log1p(1.0 / (2.0 * np.sqrt(3.0) * 500.0)) + l1 - mean,
        abs=1e-9)


def test_ultracontractivity_general_route_matches_closed_form(k3):
    rng = np.random.default_rng(106)
    f = rng.normal(size=3)
    report = ultracontractivity_check(k3, f, K3_PHI, uc_rho=2.0)
    assert report.passed
    t_exp = np.log1p(np.sqrt(3.0) * 12.0 / 2.0) / (2.0 * np.sqrt(3.0))
    assert report.params["t"] == pytest.approx(t_exp, rel=1e-12)


def test_ultracontractivity_param_validation(k3):
    with pytest.raises(BadParams):
        ultracontractivity_check(k3, np.zeros(3), K3_PHI)
    with pytest.raises(BadParams):
        ultracontractivity_check(k3, np.zeros(3), K3_PHI, t=1.0, uc_rho=1.0)
    with pytest.raises(BadParams):
        ultracontractivity_check(k3, np.zeros(3), Linear(c=1.0), t=1.0)
    with pytest.raises(NonIntegrableTail):
        ultracontractivity_check(k3, np.zeros(3), Linear(c=1.0), uc_rho=1.0)


def test_lipschitz_seminorm_values():
    chain = two_point_chain()
    assert lipschitz_seminorm(chain, np.zeros(2)) == 0.0
    assert lipschitz_seminorm(chain, np.array([0.0, np.sqrt(2.0)])) == \
        pytest.approx(1.0, rel=1e-12)
    f = np.array([0.3, -1.2])
    base = lipschitz_seminorm(chain, f)
    for c in (-2.0, 0.5):
        assert lipschitz_seminorm(chain, c * f) == pytest.approx(
            abs(c) * base, rel=1e-12)
    with pytest.raises(BadParams):
        unit_lipschitz(chain, np.ones(2))
    g = unit_lipschitz(chain, f)
    assert lipschitz_seminorm(chain, g) == pytest.approx(1.0, rel=1e-12)


def test_fisher_lipschitz_two_point():
    chain = two_point_chain()
    f = np.array([0.0, np.sqrt(2.0)])
    report = fisher_lipschitz_check(chain, f, s_grid=[0.0, 1.0])
    assert report.passed
    assert report.slack[0] == pytest.approx(0.0, abs=1e-14)
    assert report.slack[1] > 0


def test_fisher_lipschitz_q3_grid():
    chain = make_example("hypercube", {"d": 3}).chain
    rng = np.random.default_rng(107)
    for _ in range(20):
        f = rng.normal(size=8)
        report = fisher_lipschitz_check(chain, f, np.linspace(-5, 5, 41))
        assert report.passed, report.witness


def test_exp_integrability_constant():
    chain = two_point_chain()
    phi = LogGrowth(n=1.0, kappa=1.0)
    report = exp_integrability_check(chain, np.full(2, 0.7), phi,
                                     t_grid=[-2.0, 0.0, 1.5])
    assert report.passed
    assert report.slack[1] == pytest.approx(0.0, abs=1e-14)
    assert report.slack[0] > 0 and report.slack[2] > 0


def test_exp_integrability_k3_seeded(k3):
    rng = np.random.default_rng(108)
    for _ in range(200):
        f = unit_lipschitz(k3, rng.normal(size=3))
        report = exp_integrability_check(k3, f, K3_PHI)
        assert report.passed, report.witness
        assert report.params["deviation_slack"] >= 0


def test_exp_integrability_rejects_steep_input(k3):
    with pytest.raises(BadParams):
        exp_integrability_check(k3, np.array([0.0, 5.0, -5.0]), K3_PHI)


def test_exp_integrability_linear_growth(k3):
    f = unit_lipschitz(k3, np.array([0.0, 1.0, -1.0]))
    with pytest.raises(NonIntegrableGrowth):
        exp_integrability_check(k3, f, Linear(c=1.0))
    report = exp_integrability_check(k3, f, Linear(c=1.0),
                                     mean_deviation=False)
    assert report.passed


def test_exp_integrability_deviation_bound_value():
    # the deviation integral for LogGrowth is (pi/2) sqrt(n/kappa)
    assert exp_integrability_check(
        two_point_chain(), unit_lipschitz(two_point_chain(), np.array([0.0, 1.0])),
        LogGrowth(n=1.0, kappa=1.0), t_grid=[0.5],
    ).params["deviation_bound"] == pytest.approx(np.pi / 2.0, rel=1e-12)


def test_nash_constant_slack(k3):
    report = nash_check(k3, np.ones(3), alpha=6.0, beta=12.0 * np.sqrt(3.0),
                        A=1.0)
    assert report.passed
    assert report.slack[0] == pytest.approx(0.0, abs=1e-12)
    report2 = nash_check(k3, np.ones(3), alpha=2.0, beta=1.0, A=3.0)
    assert report2.slack[0] == pytest.approx(2.0 * np.log(3.0), rel=1e-12)


def test_nash_k3_seeded(k3):
    rng = np.random.default_rng(109)
    for _ in range(300):
        f = random_nonvanishing(rng, 3)
        report = nash_check(k3, f, alpha=6.0, beta=12.0 * np.sqrt(3.0), A=1.0)
        assert report.passed, report.witness


def test_nash_scale_invariance(k3):
    rng = np.random.default_rng(110)
    f = random_nonvanishing(rng, 3)
    base = nash_check(k3, f, alpha=6.0, beta=12.0 * np.sqrt(3.0), A=1.0)
    for c in (0.01, 3.0, 250.0):
        scaled = nash_check(k3, c * f, alpha=6.0, beta=12.0 * np.sqrt(3.0),
                            A=1.0)
        assert scaled.slack[0] == pytest.approx(base.slack[0], abs=1e-9)


def test_nash_guards(k3):
    with pytest.raises(VanishingEntry):
        nash_check(k3, np.array([1.0, 0.0, 1.0]), alpha=1.0, beta=1.0, A=1.0)
    with pytest.raises(BadParams):
        nash_check(k3, np.ones(3), alpha=1.0, beta=1.0, A=0.5)
    with pytest.raises(BadParams):
        nash_check(k3, np.ones(3), alpha=-1.0, beta=1.0, A=1.0)


def test_resistance_two_point():
    chain = two_point_chain()
    res = resistance_distance(chain, "0", "1")
    assert res.converged
    assert res.value == pytest.approx(np.sqrt(2.0), abs=1e-6)
    # eq comparing graph distance: 1 <= sqrt(1/2) * sqrt(2), equality
    assert res.graph_distance == 1.0
    assert res.distance_bound_ok
    assert np.sqrt(local_stats_m1_sup(chain) / 2.0) * res.value == \
        pytest.approx(1.0, abs=1e-6)


def local_stats_m1_sup(chain):
    from curvcheck.chains import local_stats

    return local_stats(chain).m1_sup


def test_resistance_path3():
    chain = path_chain(3)
    res = resistance_distance(chain, 0, 2)
    assert res.converged
    assert res.value == pytest.approx(2.0, abs=1e-6)


def test_resistance_symmetry_and_identity():
    chain = path_chain(3)
    a = resistance_distance(chain, 0, 2)
    b = resistance_distance(chain, 2, 0)
    assert a.value == pytest.approx(b.value, abs=1e-6)
    assert resistance_distance(chain, 1, 1).value == 0.0


def test_resistance_triangle_inequality_small_chains():
    for chain in (path_chain(4), make_example("hypercube", {"d": 2}).chain,
                  make_example("complete", {"n": 4}).chain):
        n = chain.n
        rho = np.zeros((n, n))
        for i in range(n):
            for j in range(i + 1, n):
                r = resistance_distance(chain, i, j)
                assert r.converged
                rho[i, j] = rho[j, i] = r.value
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    assert rho[i, j] <= rho[i, k] + rho[k, j] + 1e-6


def test_resistance_diameter_two_point():
    chain = two_point_chain()
    diam = resistance_diameter(chain)
    assert diam.value == pytest.approx(np.sqrt(2.0), abs=1e-6)
    assert diam.converged
    assert set(diam.pair) == {"0", "1"}


def test_resistance_diameter_threads_match():
    chain = path_chain(4)
    a = resistance_diameter(chain, threads=1)
    b = resistance_diameter(chain, threads=3)
    assert a.value == b.value
    assert a.pair == b.pair


def test_resistance_distance_bound_on_poisson():
    chain = poisson_chain(1.0, 8)
    res = resistance_distance(chain, 0, 4)
    assert res.converged
    assert res.distance_bound_ok
