import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from saitohlab.geometry import (Annulus, BoundaryPoint, Disc, DomainError, HarmonicField,
                                SingularityError, _annulus_normal, _normal_derivative,
                                as_points, boundary_point, characters_match, contains,
                                distance_to_boundary, domain_from_dict, flux_vector, green,
                                green_field, green_gradient, green_normal, green_normal_nodes,
                                harmonic_flux, harmonic_measure_inner, hardy_norm_exhaustion,
                                outward_normal, period_gap, poisson_reproduce, sample_interior)
from saitohlab.integration import boundary_rule

from conftest import annulus_green_series

TWO_PI = 2 * math.pi
ANN = Annulus(0.2 - 0.1j, 0.5, 1.5)

coord = st.floats(-0.6, 0.6)
points_in_disc = st.tuples(coord, coord).map(lambda p: complex(*p))


def disc_green_closed(z, t):
    return np.log(np.abs((z - t) / (1 - np.conj(t) * z)))


def interior_pair(domain, seed):
    rng = np.random.default_rng(seed)
    return sample_interior(domain, rng, 2, margin=0.1)


# --- domains


def test_domain_validation():
    with pytest.raises(DomainError):
        Disc(0j, -1.0)
    with pytest.raises(DomainError):
        Annulus(0j, 1.0, 0.5)
    with pytest.raises(DomainError):
        Annulus(0j, 0.0, 1.0)


@pytest.mark.parametrize("domain", [Disc(0.3j, 2.0), ANN])
def test_domain_dict_roundtrip(domain):
    assert domain_from_dict(domain.to_dict()) == domain


def test_boundary_parameterization():
    s = np.linspace(0, TWO_PI, 17)
    for c in range(ANN.n_components):
        z = boundary_point(ANN, c, s)
        assert np.allclose(np.abs(z - ANN.center), ANN.component_radius(c))
        n = outward_normal(ANN, c, s)
        assert np.allclose(np.abs(n), 1.0)
    # outward on the inner circle points at the center
    n = outward_normal(ANN, 1, np.array([0.0]))
    assert n[0].real == pytest.approx(-1.0)


def test_contains_and_distance():
    assert contains(ANN, ANN.center + 1.0)
    assert not contains(ANN, ANN.center + 0.2)
    assert float(distance_to_boundary(ANN, ANN.center + 0.6)) == pytest.approx(0.1)
    with pytest.raises(DomainError):
        as_points([Disc()], 1.5)


# --- Green functions


@settings(max_examples=40, deadline=None)
@given(points_in_disc, points_in_disc)
def test_disc_green_matches_moebius(z, t):
    if abs(z - t) < 1e-3:
        return
    assert green(Disc(), z, t) == pytest.approx(disc_green_closed(z, t), abs=1e-12)


def test_shifted_disc_green_scales():
    d = Disc(1 + 1j, 2.0)
    z, t = 1.5 + 0.7j, 0.4 + 1.8j
    ref = disc_green_closed((z - d.center) / 2, (t - d.center) / 2)
    assert green(d, z, t) == pytest.approx(ref, abs=1e-12)


@pytest.mark.parametrize("seed", range(4))
def test_annulus_green_matches_fourier_series(seed):
    z, t = interior_pair(ANN, seed)
    ref = annulus_green_series(ANN.center, ANN.r_inner, ANN.r_outer, z, t)
    assert green(ANN, z, t) == pytest.approx(float(ref), abs=1e-10)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6))
def test_green_symmetry(seed):
    for dom in (Disc(0.5j, 1.3), ANN):
        z, t = interior_pair(dom, seed)
        assert green(dom, z, t) == pytest.approx(green(dom, t, z), abs=1e-8)


@pytest.mark.parametrize("domain", [Disc(), Disc(1j, 0.7), ANN])
def test_green_vanishes_on_boundary(domain):
    t = sample_interior(domain, np.random.default_rng(3), 1, 0.2)[0]
    s = np.linspace(0, TWO_PI, 33)
    for c in range(domain.n_components):
        z = domain.center + (boundary_point(domain, c, s) - domain.center)
        assert np.max(np.abs(green(domain, z, t))) < 1e-8


def test_green_negative_inside():
    z = sample_interior(ANN, np.random.default_rng(5), 50, 0.05)
    assert np.all(green(ANN, z, ANN.center + 1.0 + 0.1j) < 0)


def test_green_at_pole_raises():
    with pytest.raises(SingularityError):
        green(Disc(), 0.1, 0.1)


def test_gradient_matches_finite_differences():
    z, t = 0.9 + 0.4j, 1.1 - 0.3j
    h = 1e-6
    gx = (green(ANN, z + h, t) - green(ANN, z - h, t)) / (2 * h)
    gy = (green(ANN, z + 1j * h, t) - green(ANN, z - 1j * h, t)) / (2 * h)
    assert complex(green_gradient(ANN, z, t)) == pytest.approx(gx + 1j * gy, abs=1e-7)


def test_disc_normal_derivative_is_poisson_kernel():
    t = 0.3 - 0.4j
    s = np.linspace(0, TWO_PI, 40, endpoint=False)
    zeta = np.exp(1j * s)
    poisson = (1 - abs(t) ** 2) / np.abs(zeta - t) ** 2
    dgdn = green_normal_nodes(Disc(), np.zeros(s.size, int), s, t)
    assert np.allclose(dgdn, poisson, atol=1e-12)
    assert green_normal(Disc(), BoundaryPoint.at(Disc(), 0, 0.5), t) == pytest.approx(
        (1 - abs(t) ** 2) / abs(np.exp(0.5j) - t) ** 2)


@pytest.mark.parametrize("r", [0.2, 0.5, 0.7])
def test_annulus_normal_two_formulas_agree(r):
    dom = Annulus(0.1j, r, 1.3)
    t = dom.center + math.sqrt(r * 1.3) * np.exp(0.7j)
    s = np.linspace(0, TWO_PI, 23)
    for c in (0, 1):
        z, n = boundary_point(dom, c, s), outward_normal(dom, c, s)
        a = _normal_derivative(dom, z, n, t)
        b = _annulus_normal(dom, c, s, t)
        assert np.max(np.abs(a / b - 1)) < 1e-8


def test_thin_annulus_normal_stays_positive():
    # the far side of the outer circle sits ~1e-20 below the peak
    dom = Annulus(0j, 0.85, 1.0)
    s = np.linspace(0, TWO_PI, 201)
    for c in (0, 1):
        v = green_normal_nodes(dom, np.full(s.size, c), s, math.sqrt(0.85))
        assert np.all(v > 0)


@pytest.mark.parametrize("domain", [Disc(0.2, 1.5), ANN])
def test_total_flux_is_two_pi(domain):
    t = sample_interior(domain, np.random.default_rng(11), 1, 0.15)[0]
    rule = boundary_rule(domain, 512)
    dgdn = green_normal_nodes(domain, rule.components, rule.params, t)
    assert rule.integrate(dgdn) == pytest.approx(TWO_PI, abs=1e-8)


def test_inner_flux_is_harmonic_measure():
    t = ANN.center + 0.9 * np.exp(2j)
    rule = boundary_rule(ANN, 512)
    dgdn = green_normal_nodes(ANN, rule.components, rule.params, t)
    inner = np.sum((rule.weights * dgdn)[rule.components == 1])
    assert inner == pytest.approx(TWO_PI * harmonic_measure_inner(ANN, t), abs=1e-8)


# --- Poisson reproduction


DISC_TRACES = [
    (lambda z, k=k: z ** k, lambda t, k=k: t ** k) for k in range(6)
] + [
    (lambda z: (z - 0.2) ** 3 + 1j * z, lambda t: (t - 0.2) ** 3 + 1j * t),
    (lambda z: np.conj(z) ** 2, lambda t: np.conj(t) ** 2),
    (lambda z: np.abs(z) ** 2, lambda t: 1.0 + 0 * t),  # trace 1 on |z| = 1
    (lambda z: z.real * z.imag, lambda t: t.real * t.imag),
]


@pytest.mark.parametrize("pair", DISC_TRACES)
def test_poisson_reproduces_disc_polynomials(pair):
    f, u = pair
    t = 0.35 - 0.2j
    rule = boundary_rule(Disc(), 256)
    assert abs(poisson_reproduce(Disc(), f(rule.nodes), t, rule) - u(t)) < 1e-8


ANN_TRACES = [
    lambda z: z ** 3, lambda z: z ** -2, lambda z: np.log(np.abs(z - ANN.center)),
    lambda z: (z - ANN.center) ** -1 + np.conj(z - ANN.center) ** 2,
    lambda z: np.real((z - ANN.center) ** 4) - 2 * np.log(np.abs(z - ANN.center)),
]


@pytest.mark.parametrize("f", ANN_TRACES)
def test_poisson_reproduces_annulus_harmonics(f):
    t = ANN.center + 1.1 * np.exp(0.4j)
    rule = boundary_rule(ANN, 512)
    assert abs(poisson_reproduce(ANN, f(rule.nodes), t, rule) - f(t)) < 1e-6


def test_poisson_checks_sample_count():
    rule = boundary_rule(Disc(), 64)
    with pytest.raises(ValueError):
        poisson_reproduce(Disc(), np.ones(10), 0j, rule)


# --- harmonic fields and fluxes


def test_harmonic_field_value_and_gradient():
    u = HarmonicField((1.0, 0.5 - 0.2j, 0.1j), log_coef=0.3, center=ANN.center)
    z = ANN.center + 1.0 + 0.2j
    w = z - ANN.center
    ref = np.real(1.0 + (0.5 - 0.2j) * w + 0.1j * w ** 2) + 0.3 * math.log(abs(w))
    assert u.value(ANN, z) == pytest.approx(ref)
    h = 1e-6
    gx = (u.value(ANN, z + h) - u.value(ANN, z - h)) / (2 * h)
    gy = (u.value(ANN, z + 1j * h) - u.value(ANN, z - 1j * h)) / (2 * h)
    assert complex(u.gradient(ANN, z)) == pytest.approx(gx + 1j * gy, abs=1e-7)


def test_harmonic_field_dict_roundtrip():
    u = HarmonicField((0j, 1 + 2j), 0.5, ((1.5, 0.1j),), center=0.3)
    assert HarmonicField.from_dict(u.to_dict()) == u


def test_log_term_rejected_on_disc():
    with pytest.raises(DomainError):
        HarmonicField(log_coef=1.0).validate(Disc())


def test_lelong_numbers():
    u = green_field(0.2, 1.5).plus(HarmonicField((0j, 1.0)))
    assert u.lelong(0.2) == pytest.approx(1.5)
    assert u.lelong(0.5) == 0.0


@pytest.mark.parametrize("a", [-1.0, 0.25, 0.7])
def test_log_flux_on_inner_circle(a):
    u = HarmonicField(log_coef=a, center=ANN.center)
    # outward normal of the inner circle points inwards
    assert harmonic_flux(ANN, u, 1) == pytest.approx(-TWO_PI * a, abs=1e-10)
    assert harmonic_flux(ANN, u, 0) == pytest.approx(TWO_PI * a, abs=1e-10)


def test_polynomial_fields_have_no_period():
    u = HarmonicField((0j, 0.4, -0.3j), center=ANN.center)
    assert np.allclose(flux_vector(ANN, u), 0.0, atol=1e-10)


def test_green_flux_matches_log_field():
    t = ANN.center + 1.0
    omega = harmonic_measure_inner(ANN, t)
    g = green_field(t)
    assert characters_match(ANN, g, HarmonicField(log_coef=-omega, center=ANN.center),
                            tol=1e-8)
    assert not characters_match(ANN, g, HarmonicField(center=ANN.center), tol=1e-8)


def test_period_gap_is_mod_two_pi():
    assert period_gap(0.1, 0.1 + TWO_PI) == pytest.approx(0.0, abs=1e-12)
    assert period_gap(0.0, math.pi) == pytest.approx(math.pi)


# --- Hardy norms by exhaustion


def test_disc_exhaustion_levels():
    vals = hardy_norm_exhaustion(Disc(), lambda z: z, 0j, 5)
    ks = np.arange(2, 7)
    assert np.allclose(vals, (1 - 1 / ks) ** 2, atol=1e-12)


def test_exhaustion_increases_to_weighted_hardy_norm():
    t = 0.3
    f = lambda z: 1 + z ** 2
    vals = hardy_norm_exhaustion(Disc(), f, t, 6, k_start=4)
    assert np.all(np.diff(vals) > 0)
    rule = boundary_rule(Disc(), 512)
    dgdn = green_normal_nodes(Disc(), rule.components, rule.params, t)
    limit = rule.integrate(np.abs(f(rule.nodes)) ** 2 * dgdn) / TWO_PI
    assert vals[-1] < limit
    far = hardy_norm_exhaustion(Disc(), f, t, 1, k_start=400)[0]
    # the gap closes like 1/k
    assert 0 < limit - far < 0.02 * (limit - vals[0])


def test_annulus_exhaustion_is_ring_shaped():
    vals = hardy_norm_exhaustion(ANN, lambda z: np.ones_like(z), ANN.center + 1.0, 3)
    # f = 1 has harmonic-measure average 1 on every level set
    assert np.allclose(vals, 1.0, atol=1e-6)
