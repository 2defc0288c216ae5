import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from saitohlab.geometry import Annulus, Disc
from saitohlab.integration import (QuadratureRule, area_rule, boundary_rule,
                                   default_area_rule, distinguished_normalization,
                                   kinked_polydisc_rules, moebius_rule, pullback_extra_nodes,
                                   tensor_rule)

ANN = Annulus(0.5j, 0.3, 1.2)


def test_boundary_rule_lengths():
    rule = boundary_rule(ANN, 64)
    assert rule.size == 128
    assert rule.integrate(np.ones(rule.size)) == pytest.approx(2 * math.pi * (0.3 + 1.2))


@settings(max_examples=30, deadline=None)
@given(st.integers(-20, 20), st.floats(0.0, 0.99))
def test_boundary_rule_exact_on_trig_polynomials(k, offset):
    rule = boundary_rule(Disc(), 48, offset)
    val = rule.integrate(rule.nodes ** k)
    assert abs(val - (2 * math.pi if k == 0 else 0.0)) < 1e-12


def test_offset_rules_share_no_nodes():
    a, b = boundary_rule(Disc(), 32), boundary_rule(Disc(), 32, 0.5)
    assert np.min(np.abs(a.nodes[:, None] - b.nodes[None, :])) > 1e-3


@pytest.mark.parametrize("k", range(8))
def test_area_rule_monomial_norms(k):
    rule = area_rule(Disc(), 12, 24)
    assert rule.integrate(np.abs(rule.nodes) ** (2 * k)) == pytest.approx(math.pi / (k + 1))
    rule = area_rule(ANN, 12, 24)
    w = rule.nodes - ANN.center
    ref = math.pi * (1.2 ** (2 * k + 2) - 0.3 ** (2 * k + 2)) / (k + 1)
    assert rule.integrate(np.abs(w) ** (2 * k)) == pytest.approx(ref, rel=1e-12)


def test_default_area_rule_is_exact_to_degree():
    rule = default_area_rule(Disc(), 10)
    z = rule.nodes
    assert abs(rule.integrate(np.conj(z ** 10) * z ** 10) - math.pi / 11) < 1e-12
    assert abs(rule.integrate(np.conj(z ** 3) * z ** 4)) < 1e-12


def test_rule_size_validation():
    with pytest.raises(ValueError):
        boundary_rule(Disc(), 4)
    with pytest.raises(ValueError):
        area_rule(Disc(), 2, 16)
    with pytest.raises(ValueError):
        QuadratureRule(np.zeros(2), np.array([1.0, -1.0]), "area")
    with pytest.raises(ValueError):
        tensor_rule([])


def test_tensor_rule_is_product():
    a, b = boundary_rule(Disc(), 8), area_rule(Disc(), 4, 8)
    t = tensor_rule([a, b])
    assert t.size == a.size * b.size
    assert t.integrate(np.ones(t.size)) == pytest.approx(2 * math.pi * math.pi)
    f = np.abs(t.nodes[:, 1]) ** 2
    assert t.integrate(f) == pytest.approx(2 * math.pi * math.pi / 2)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_distinguished_normalization(n):
    rule = tensor_rule([boundary_rule(Disc(), 8)] * n)
    assert distinguished_normalization(n) * rule.integrate(np.ones(rule.size)) == \
        pytest.approx(1.0)


# --- automorphism push-forward and kink-adapted rules


def test_moebius_rule_keeps_totals():
    d = Disc(0.5 - 0.5j, 2.0)
    a = d.center + 1.6
    # the Jacobian is a Poisson kernel; 256 nodes resolve it at |b| = 0.8
    b = moebius_rule(boundary_rule(d, 256), d, a)
    assert b.integrate(np.ones(b.size)) == pytest.approx(2 * math.pi * 2.0, rel=1e-12)
    assert np.allclose(np.abs(b.nodes - d.center), 2.0)
    ar = moebius_rule(area_rule(d, 32, 256), d, a)
    assert ar.integrate(np.ones(ar.size)) == pytest.approx(math.pi * 4.0, rel=1e-10)


def test_moebius_rule_resolves_peaked_szego_norm():
    # (1/2pi) int |1/(1 - conj(a) z)|^2 |dz| = 1/(1 - |a|^2), peaked at a = 0.95
    a = 0.95j
    f = lambda z: np.abs(1 / (1 - np.conj(a) * z)) ** 2
    plain = boundary_rule(Disc(), 32)
    pushed = moebius_rule(plain, Disc(), a)
    exact = 1 / (1 - abs(a) ** 2)
    assert abs(pushed.integrate(f(pushed.nodes)) / (2 * math.pi) - exact) < 1e-10 * exact
    assert abs(plain.integrate(f(plain.nodes)) / (2 * math.pi) - exact) > 1e-3 * exact


def test_moebius_rule_below_threshold_is_identity():
    rule = boundary_rule(Disc(), 16)
    assert moebius_rule(rule, Disc(), 0.3) is rule
    ann = Annulus(0j, 0.5, 1.0)
    assert moebius_rule(boundary_rule(ann, 16), ann, 0.9).nodes.size == 32


def test_pullback_extra_nodes_grow_toward_boundary():
    weight = lambda z: np.exp(-np.real(0.3 * z))
    assert pullback_extra_nodes(Disc(), 0.3, weight) == (0, 0)
    assert pullback_extra_nodes(Disc(), 0.9, None) == (0, 0)
    near, far = (pullback_extra_nodes(Disc(), b, weight) for b in (0.6, 0.9))
    assert near[0] < far[0] and near[1] < far[1]
    # a radial weight in the automorphism coordinate would need none; a
    # constant weight has no bandwidth at all
    assert pullback_extra_nodes(Disc(), 0.9, lambda z: np.ones_like(z, dtype=float)) == (0, 0)


@pytest.mark.parametrize("p", [(2.0, 2.0), (3.0, 1.5)])
def test_kinked_rules_integrate_max_exactly(p):
    discs, points = [Disc(), Disc()], [0j, 0j]
    rules = kinked_polydisc_rules(discs, points, p, 10, 16)
    assert len({r.size for r in rules}) == 1
    w = rules[0].weights
    assert np.all(rules[1].weights == 1.0)
    assert w.sum() == pytest.approx(math.pi ** 2, rel=1e-12)
    # int max(|z1|^p1, |z2|^p2) = 2 pi^2 / 3 for both exponent pairs (p1 = 2 p2)
    exact = 2 * math.pi ** 2 / 3
    g = np.maximum(np.abs(rules[0].nodes) ** p[0], np.abs(rules[1].nodes) ** p[1])
    assert abs(np.sum(w * g) - exact) < 1e-6 * exact
    # the tensor rule of comparable size misses the kink
    a = area_rule(Disc(), 10, 16)
    t = tensor_rule([a, a])
    gt = np.maximum(np.abs(t.nodes[:, 0]) ** p[0], np.abs(t.nodes[:, 1]) ** p[1])
    assert abs(t.integrate(gt) - exact) > 1e-5 * exact
