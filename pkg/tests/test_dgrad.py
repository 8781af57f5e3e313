import numpy as np
import pytest

from core.dgrad import (
    DegeneracyMode,
    DegeneracyPolicy,
    DissipationCase,
    DissipationConfig,
    ForceScheme,
    SchemeVariant,
    algorithmic_velocity,
    algorithmic_velocity_generic,
    alpha_coefficients,
    combined_force,
    conservation_fn,
    conservative_force,
    dissipation_fn_f,
    dissipation_fn_s,
    evaluate_force,
    g_equivariant_force,
    gonzalez_force,
    hessian_metric,
    lagrange_multipliers,
    one_d_discrete_derivative,
    velocity_beta,
    velocity_multipliers,
)
from core.errors import DegenerateDenominatorError
from systems.spring_network import Spring, SpringNetwork3D

N_PAIRS = 1000


def _pairs(system, rng, n=N_PAIRS):
    for _ in range(n):
        yield system.sample_point(rng), system.sample_point(rng)


def _scale(system, x, y):
    return max(1.0, abs(system.potential(x)) + abs(system.potential(y)))


def _random_spd(rng, n):
    B = rng.normal(size=(n, n))
    return B @ B.T + n * np.eye(n)


# ==================== Directionality ====================

@pytest.mark.parametrize("name", ["example1", "example2", "linear_oscillator", "spring_network"])
def test_conservative_force_directionality(catalog, rng, name):
    system = catalog[name]
    for x, y in _pairs(system, rng):
        f = conservative_force(system, x, y)
        defect = float(f @ (y - x)) - (system.potential(y) - system.potential(x))
        assert abs(defect) <= 1e-12 * _scale(system, x, y)


@pytest.mark.parametrize("name", ["example1", "example2", "spring_network"])
def test_combined_force_adds_dissipation(catalog, rng, name):
    system = catalog[name]
    cfg = DissipationConfig(chi_f=0.01, D=np.eye(system.dim), h=0.01)
    for x, y in _pairs(system, rng, 50):
        f = combined_force(system, cfg, x, y)
        expected = system.potential(y) - system.potential(x) + dissipation_fn_f(cfg, x, y)
        assert float(f @ (y - x)) == pytest.approx(expected, abs=1e-12 * _scale(system, x, y))


def test_consistency_on_the_diagonal(example1, rng):
    system = example1.system
    x = system.sample_point(rng)
    np.testing.assert_allclose(conservative_force(system, x, x), system.grad_potential(x))


def test_decomposition_along_the_step(example1, rng):
    system = example1.system
    x, y = system.sample_point(rng), system.sample_point(rng)
    dq = y - x
    f = conservative_force(system, x, y)
    projection = float(f @ dq) / float(dq @ dq) * dq
    expected = (system.potential(y) - system.potential(x)) / float(dq @ dq) * dq
    np.testing.assert_allclose(projection, expected, rtol=0, atol=1e-12 * _scale(system, x, y))


def test_second_order_perturbation(example1):
    system = example1.system
    mid = np.array([0.3, 0.2])
    direction = np.array([1.0, 0.7])

    def deviation(eps):
        x, y = mid - 0.5 * eps * direction, mid + 0.5 * eps * direction
        return np.linalg.norm(conservative_force(system, x, y) - system.grad_potential(mid))

    eps = np.logspace(-4, -1, 7)
    slope = np.polyfit(np.log(eps), np.log([deviation(e) for e in eps]), 1)[0]
    assert slope == pytest.approx(2.0, abs=0.1)


@pytest.mark.parametrize("name", ["example1", "example2", "spring_network"])
def test_combined_force_approaches_the_gradient(catalog, rng, name):
    system = catalog[name]
    cfg = DissipationConfig(chi_f=0.01, D=np.eye(system.dim), h=0.01)
    x = system.sample_point(rng)
    direction = rng.normal(size=system.dim)
    direction /= np.linalg.norm(direction)

    def deviation(eps):
        return np.linalg.norm(combined_force(system, cfg, x, x + eps * direction) - system.grad_potential(x))

    deviations = np.array([deviation(eps) for eps in (1e-2, 1e-3, 1e-4)])
    assert np.all(np.log10(deviations[:-1] / deviations[1:]) >= 0.9)


# ==================== One-dimensional oracle ====================

def test_conservation_function_of_the_quartic(quartic):
    assert conservation_fn(quartic, np.array([0.0]), np.array([1.0])) == pytest.approx(-0.25)


def test_one_d_oracle(quartic, rng):
    for _ in range(N_PAIRS):
        x = rng.uniform(-2.0, 2.0)
        y = x + rng.choice([-1.0, 1.0]) * rng.uniform(0.1, 1.0)
        expected = one_d_discrete_derivative(lambda q: 0.25 * q ** 4, x, y)
        f = conservative_force(quartic, np.array([x]), np.array([y]))[0]
        assert f == pytest.approx(expected, abs=1e-12 * max(1.0, abs(expected)))


def test_one_d_oracle_on_the_diagonal():
    assert one_d_discrete_derivative(lambda q: q ** 3, 2.0, 2.0, dV=lambda q: 3 * q ** 2) == 12.0
    assert one_d_discrete_derivative(lambda q: q ** 2, 1.5, 1.5) == pytest.approx(3.0, rel=1e-8)


# ==================== Hand-evaluated values ====================

def test_combined_force_with_unit_dissipation(quartic):
    cfg = DissipationConfig(chi_f=1.0, D=np.eye(1), h=1.0)
    x, y = np.array([0.0]), np.array([1.0])
    assert dissipation_fn_f(cfg, x, y) == pytest.approx(0.5)
    f = combined_force(quartic, cfg, x, y)
    assert f[0] == pytest.approx(0.75)
    assert float(f @ (y - x)) == pytest.approx(0.25 + 0.5)


def test_gonzalez_and_alpha_on_the_quartic(quartic):
    x, y = np.array([0.0]), np.array([1.0])
    assert gonzalez_force(quartic, x, y, metric=np.eye(1))[0] == pytest.approx(0.25)
    alpha_cons, alpha_diss = alpha_coefficients(quartic, DissipationConfig(), x, y)
    assert alpha_cons == pytest.approx(-0.5)
    assert alpha_diss == 0.0


def test_one_d_derivative_of_a_quadratic():
    assert one_d_discrete_derivative(lambda q: 0.5 * q ** 2, 1.0, 3.0) == pytest.approx(2.0)
    assert one_d_discrete_derivative(lambda q: 0.25 * q ** 4, 0.0, 1.0) == pytest.approx(0.25)


def test_force_dissipation_with_the_example1_matrix():
    cfg = DissipationConfig(chi_f=0.0025, D=[[16.0, -15.0], [-15.0, 16.0]], h=1e-3)
    assert dissipation_fn_f(cfg, np.zeros(2), np.array([1e-3, 0.0])) == pytest.approx(2.0e-5, rel=1e-12)


def test_stabilized_velocity_of_a_unit_mass():
    cfg = DissipationConfig(chi_s=0.3, h=0.1)
    M, u, v = np.eye(1), np.array([1.0]), np.array([2.0])
    assert dissipation_fn_s(cfg, M, u, v) == pytest.approx(1.5)
    assert velocity_beta(M, cfg, u, v) == pytest.approx(1.0)
    np.testing.assert_allclose(algorithmic_velocity(M, cfg, u, v), [3.0])


def test_g_equivariant_force_of_a_single_spring():
    system = SpringNetwork3D([1.0, 1.0], [Spring(0, 1, 1.0)])
    x = np.array([1.0, 0.0, 0.0, 0.0, 0.0, 0.0])
    y = np.array([1.2, 0.0, 0.0, 0.0, 0.0, 0.0])
    f = g_equivariant_force(system, DissipationConfig(), x, y)
    np.testing.assert_allclose(f, [1.1, 0.0, 0.0, -1.1, 0.0, 0.0], rtol=1e-12)


# ==================== Metric independence ====================

def test_alpha_does_not_depend_on_the_metric(example1, rng):
    system = example1.system
    cfg = DissipationConfig(chi_f=0.01, D=np.eye(2), h=0.01)
    for _ in range(20):
        x, y = system.sample_point(rng), system.sample_point(rng)
        alpha_cons, alpha_diss = alpha_coefficients(system, cfg, x, y)
        for _ in range(3):
            multipliers = lagrange_multipliers(system, cfg, x, y, _random_spd(rng, 2))
            assert multipliers.alpha_cons == pytest.approx(alpha_cons, rel=1e-9, abs=1e-12)
            assert multipliers.alpha_diss == pytest.approx(alpha_diss, rel=1e-9, abs=1e-12)


def test_hessian_metric_of_a_quadratic(oscillator):
    system = oscillator.system
    np.testing.assert_allclose(hessian_metric(system, np.ones(1)), np.linalg.inv(system.K))


# ==================== Gonzalez ====================

def test_gonzalez_directionality(example1, rng):
    system = example1.system
    metric = _random_spd(rng, 2)
    for x, y in _pairs(system, rng, 50):
        dV = system.potential(y) - system.potential(x)
        for G in (None, metric):
            f = gonzalez_force(system, x, y, metric=G)
            assert float(f @ (y - x)) == pytest.approx(dV, abs=1e-12 * _scale(system, x, y))


def test_gonzalez_differs_on_the_quartic(example1, rng):
    system = example1.system
    x, y = np.array([1.0, 0.918]), np.array([0.4, -0.3])
    difference = gonzalez_force(system, x, y) - conservative_force(system, x, y)
    assert np.linalg.norm(difference) > 1e-6


def test_forces_agree_on_quadratics(oscillator):
    system = oscillator.system
    x, y = np.array([0.3]), np.array([-0.8])
    np.testing.assert_allclose(conservative_force(system, x, y), system.grad_potential(0.5 * (x + y)))
    np.testing.assert_allclose(gonzalez_force(system, x, y), system.grad_potential(0.5 * (x + y)))


# ==================== G-equivariant ====================

def test_g_equivariant_is_orthogonal_to_rigid_motions(free_cube, rng):
    system, _ = free_cube
    cfg = DissipationConfig(chi_f=0.02, h=0.01)
    for x, y in _pairs(system, rng, 50):
        f = g_equivariant_force(system, cfg, x, y)
        mid = 0.5 * (x + y)
        for axis in np.eye(3):
            translation = system.translation_generator(axis, mid)
            rotation = system.rotation_generator(axis, mid)
            assert abs(float(f @ translation)) <= 1e-12 * max(1.0, np.linalg.norm(f) * np.linalg.norm(translation))
            assert abs(float(f @ rotation)) <= 1e-12 * max(1.0, np.linalg.norm(f) * np.linalg.norm(rotation))


def test_g_equivariant_directionality(free_cube, rng):
    system, _ = free_cube
    scheme = ForceScheme(SchemeVariant.G_EQUIVARIANT, DissipationConfig(chi_f=0.02, h=0.01))
    for x, y in _pairs(system, rng, 50):
        evaluation = evaluate_force(system, scheme, x, y)
        expected = system.potential(y) - system.potential(x) + evaluation.diss_f
        assert evaluation.diss_f > 0
        assert float(evaluation.force @ (y - x)) == pytest.approx(expected, abs=1e-12 * _scale(system, x, y))


# ==================== Velocity ====================

def test_velocity_dissipation_constraint(example1, rng):
    M = example1.system.mass()
    cfg = DissipationConfig(chi_s=0.008, h=1e-3)
    for _ in range(N_PAIRS):
        u, v = rng.normal(size=2), rng.normal(size=2)
        s = algorithmic_velocity(M, cfg, u, v)
        lhs = float(M @ (s - 0.5 * (u + v)) @ (v - u))
        assert lhs == pytest.approx(dissipation_fn_s(cfg, M, u, v), abs=1e-12 * max(1.0, float(u @ u + v @ v)))


def test_velocity_beta_matches_stationarity_system(example1, rng):
    M = example1.system.mass()
    cfg = DissipationConfig(chi_s=0.008, h=1e-3)
    u, v = rng.normal(size=2), rng.normal(size=2)
    beta, _ = velocity_multipliers(M, cfg, u, v)
    assert beta == pytest.approx(velocity_beta(M, cfg, u, v), rel=1e-10)


def test_generic_velocity_path(example1, rng):
    M = example1.system.mass()
    cfg = DissipationConfig(chi_s=0.008, h=1e-3)
    u, v = rng.normal(size=2), rng.normal(size=2)
    generic = algorithmic_velocity_generic(M, lambda a, b: dissipation_fn_s(cfg, M, a, b), u, v)
    np.testing.assert_allclose(generic, algorithmic_velocity(M, cfg, u, v), rtol=1e-10)
    # Equal kinetic energies: no dissipative factor
    np.testing.assert_allclose(algorithmic_velocity_generic(M, lambda a, b: 1.0, u, -u), np.zeros(2), atol=1e-15)


def test_velocity_beta_vanishes_without_motion(example1):
    M = example1.system.mass()
    cfg = DissipationConfig(chi_s=0.008, h=1e-3)
    assert velocity_beta(M, cfg, np.zeros(2), np.zeros(2)) == 0.0


# ==================== Degeneracy ====================

def test_fallback_on_degenerate_pair(example1):
    system = example1.system
    x = np.array([0.2, -0.1])
    evaluation = evaluate_force(system, ForceScheme(), x, x.copy())
    assert evaluation.degenerate
    assert evaluation.diss_f == 0.0
    np.testing.assert_allclose(evaluation.force, system.grad_potential(x))


def test_strict_policy_raises(example1):
    system = example1.system
    x = np.array([0.2, -0.1])
    policy = DegeneracyPolicy(mode=DegeneracyMode.STRICT)
    with pytest.raises(DegenerateDenominatorError):
        conservative_force(system, x, x.copy(), policy)
    with pytest.raises(DegenerateDenominatorError):
        gonzalez_force(system, x, x.copy(), policy=policy)


def test_lagrange_multipliers_reject_singular_system(oscillator):
    with pytest.raises(DegenerateDenominatorError):
        lagrange_multipliers(oscillator.system, DissipationConfig(), np.ones(1), np.ones(1), np.eye(1))


# ==================== Configuration ====================

def test_dissipation_cases(example1):
    preset = DissipationConfig(chi_f=0.0025, chi_s=0.008, h=1e-3)
    assert DissipationCase.CONSERVATIVE.apply(preset).is_active is False
    assert DissipationCase.FORCE.apply(preset).chi_s == 0.0
    assert DissipationCase.VELOCITY.apply(preset).chi_f == 0.0
    full = DissipationCase.FULL.apply(preset)
    assert (full.chi_f, full.chi_s) == (0.0025, 0.008)


def test_dissipation_config_validation():
    with pytest.raises(ValueError):
        DissipationConfig(chi_f=-1.0)
    with pytest.raises(ValueError):
        DissipationConfig(D=np.diag([1.0, -1.0]))
    assert DissipationConfig.none().weight(3).shape == (3, 3)


def test_example_presets(example1, example2):
    assert example1.dissipation.chi_f == 0.0025
    assert example1.dissipation.chi_s == 0.008
    np.testing.assert_array_equal(example1.dissipation.D, [[16.0, -15.0], [-15.0, 16.0]])
    assert example2.dissipation.chi_f == example2.dissipation.chi_s == 0.001
