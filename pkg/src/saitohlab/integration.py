"""Quadrature rules on circles, discs, annuli and their products.

Boundary rules are composite trapezoid rules in the angle, which converge
geometrically for integrands analytic near the curve.  Area rules are
Gauss-Legendre in the radius times trapezoid in the angle.  Rules carry raw
arclength/area weights; the ``1/2pi`` and ``(2pi)^{-n}`` normalizations of
the Hardy-type norms are applied by whoever assembles the measure.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .geometry import (SHIFT_THRESHOLD, Disc, Domain, TWO_PI, automorphism_shift,
                       boundary_point, outward_normal)


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    nodes: np.ndarray
    weights: np.ndarray
    kind: str
    # boundary rules only
    components: np.ndarray | None = None
    params: np.ndarray | None = None
    normals: np.ndarray | None = None
    factors: tuple["QuadratureRule", ...] = ()

    def __post_init__(self):
        if len(self.nodes) != len(self.weights):
            raise ValueError("node and weight counts differ")
        if np.any(self.weights <= 0):
            raise ValueError("quadrature weights must be positive")

    @property
    def size(self) -> int:
        return len(self.weights)

    def integrate(self, values) -> complex | float:
        return np.sum(self.weights * np.asarray(values))


def boundary_rule(domain: Domain, n: int, offset: float = 0.0) -> QuadratureRule:
    """``n`` equispaced trapezoid nodes on each boundary component.

    ``offset`` (a fraction of the node spacing) rotates the nodes; two rules
    with different offsets share no nodes.
    """
    if n < 8:
        raise ValueError(f"boundary rule needs at least 8 nodes per component, got {n}")
    s = TWO_PI * (np.arange(n) + offset) / n
    nodes, weights, comps, params, normals = [], [], [], [], []
    for c in range(domain.n_components):
        r = domain.component_radius(c)
        nodes.append(boundary_point(domain, c, s))
        normals.append(outward_normal(domain, c, s))
        weights.append(np.full(n, TWO_PI * r / n))
        comps.append(np.full(n, c))
        params.append(s)
    return QuadratureRule(np.concatenate(nodes), np.concatenate(weights), "boundary",
                          np.concatenate(comps), np.concatenate(params), np.concatenate(normals))


def area_rule(domain: Domain, n_radial: int, n_angular: int,
              offset: float = 0.0) -> QuadratureRule:
    """Polar tensor rule: Gauss-Legendre in ``r`` times trapezoid in the angle."""
    if n_radial < 4 or n_angular < 8:
        raise ValueError("area rule needs n_radial >= 4 and n_angular >= 8")
    x, wx = np.polynomial.legendre.leggauss(n_radial)
    a, b = domain.inner_radius, domain.outer_radius
    r = 0.5 * (b - a) * x + 0.5 * (b + a)
    wr = 0.5 * (b - a) * wx * r
    theta = TWO_PI * (np.arange(n_angular) + offset) / n_angular
    nodes = domain.center + np.outer(r, np.exp(1j * theta)).ravel()
    weights = np.outer(wr, np.full(n_angular, TWO_PI / n_angular)).ravel()
    return QuadratureRule(nodes, weights, "area")


def moebius_rule(rule: QuadratureRule, domain: Domain, point: complex,
                 threshold: float = SHIFT_THRESHOLD) -> QuadratureRule:
    """Push ``rule`` forward by the disc automorphism taking the center to ``point``.

    Nodes near ``point`` become dense, matching bases that are powers of the
    automorphism; weights pick up ``|dz/dzeta|`` (boundary) or its square
    (area).  Rules on annuli and points close to the center (see
    ``automorphism_shift``) leave the rule unchanged.
    """
    b = automorphism_shift(domain, point, threshold)
    if b == 0:
        return rule
    c, r = domain.center, domain.radius
    u = (rule.nodes - c) / r
    den = 1 + np.conj(b) * u
    v = (u + b) / den
    jac = (1 - abs(b) ** 2) / np.abs(den) ** 2
    nodes = c + r * v
    if rule.kind == "boundary":
        params = np.angle(v) % TWO_PI
        return QuadratureRule(nodes, rule.weights * jac, "boundary", rule.components, params,
                              v / np.abs(v))
    return QuadratureRule(nodes, rule.weights * jac ** 2, rule.kind)


def pullback_extra_nodes(domain: Domain, point: complex, weight,
                         threshold: float = SHIFT_THRESHOLD, tol: float = 1e-13) -> tuple[int, int]:
    """``(angular, radial)`` nodes to add before ``moebius_rule`` for ``weight``.

    A weight smooth in ``z`` pulls back to one with a singularity at
    ``zeta = -1/conj(b)``.  The angular count is the Fourier bandwidth of the
    pulled-back weight on the unit circle and the radial count half the
    Chebyshev length along the ray toward the singularity, both cut at
    ``tol`` relative to the largest coefficient.
    """
    b = automorphism_shift(domain, point, threshold)
    if b == 0 or weight is None:
        return 0, 0
    c, r = domain.center, domain.radius
    to_z = lambda zeta: c + r * (zeta + b) / (1 + np.conj(b) * zeta)
    m = 1024
    f = np.asarray(weight(to_z(np.exp(2j * np.pi * np.arange(m) / m))), dtype=float)
    coef = np.abs(np.fft.rfft(f)) / m
    ang = int(np.nonzero(coef > tol * coef.max())[0].max())
    ray = -b / abs(b)
    cheb = np.polynomial.Chebyshev.interpolate(
        lambda t: np.asarray(weight(to_z(0.5 * (t + 1) * ray)), dtype=float), 255)
    ca = np.abs(cheb.coef)
    rad = int(np.nonzero(ca > tol * ca.max())[0].max())
    return ang, (rad + 1) // 2


def kinked_polydisc_rules(discs: Sequence[Disc], points: Sequence[complex],
                          p: Sequence[float], n_radial: int, n_angular: int,
                          offset: float = 0.0, grade: int = 3) -> tuple[QuadratureRule, ...]:
    """Aligned area rules on a polydisc, split along ``max_j p_j log|zeta_j|``.

    ``zeta_j`` is the automorphism coordinate of disc ``j`` vanishing at
    ``points[j]``.  Weights of the form ``f(max_j p_j log|zeta_j|)`` have a
    kink where the maximum switches; on the piece where factor ``j`` attains
    it the other radii run over ``[0, r_j^(p_j/p_l)]`` and everything is
    smooth.  ``r_j = s^grade`` damps the fractional powers at ``r_j = 0``.
    Returned rules have equal length and must be zipped; the full weight
    sits in the first rule.
    """
    n = len(discs)
    x, wx = np.polynomial.legendre.leggauss(n_radial)
    t, wt = 0.5 * (x + 1), 0.5 * wx
    theta = TWO_PI * (np.arange(n_angular) + offset) / n_angular
    wth = TWO_PI / n_angular
    coords, weights = [[] for _ in range(n)], []
    for j in range(n):
        grids = np.meshgrid(*([np.arange(n_radial)] * n + [np.arange(n_angular)] * n),
                            indexing="ij")
        ri = [g.ravel() for g in grids[:n]]
        ai = [g.ravel() for g in grids[n:]]
        rj = t[ri[j]] ** grade
        w = wt[ri[j]] * grade * t[ri[j]] ** (grade - 1) * rj
        radii = []
        for l in range(n):
            if l == j:
                radii.append(rj)
                continue
            top = rj ** (p[j] / p[l])
            rl = top * t[ri[l]]
            w = w * wt[ri[l]] * top * rl
            radii.append(rl)
        weights.append(w * wth ** n)
        for l in range(n):
            coords[l].append(radii[l] * np.exp(1j * theta[ai[l]]))
    w = np.concatenate(weights)
    rules = []
    for l, (d, a) in enumerate(zip(discs, points)):
        u = np.concatenate(coords[l])
        rule = QuadratureRule(d.center + d.radius * u, np.ones(u.size), "area")
        # the automorphism scales area by jac^2; the disc radius by R^2
        rule = moebius_rule(rule, d, a, threshold=0.0)
        w = w * d.radius ** 2 * rule.weights
        rules.append(rule)
    rules[0] = QuadratureRule(rules[0].nodes, w, "area")
    for l in range(1, n):
        rules[l] = QuadratureRule(rules[l].nodes, np.ones(w.size), "area")
    return tuple(rules)


def tensor_rule(rules: Sequence[QuadratureRule]) -> QuadratureRule:
    """Cartesian product rule; nodes become rows of coordinates."""
    if not rules:
        raise ValueError("tensor_rule needs at least one factor rule")
    grids = np.meshgrid(*[np.arange(r.size) for r in rules], indexing="ij")
    idx = [g.ravel() for g in grids]
    nodes = np.stack([r.nodes[i] for r, i in zip(rules, idx)], axis=1)
    weights = np.prod(np.stack([r.weights[i] for r, i in zip(rules, idx)]), axis=0)
    return QuadratureRule(nodes, weights, "tensor", factors=tuple(rules))


def distinguished_normalization(n: int) -> float:
    """Factor ``(2pi)^{-n}`` turning ``prod |dw_j|`` into ``d sigma``."""
    return TWO_PI ** (-n)


def default_area_rule(domain: Domain, degree: int, extra: int = 8) -> QuadratureRule:
    """Area rule exact for ``|z^k|^2`` (times smooth weights) up to ``k = degree``."""
    n_radial = max(4, degree + extra)
    n_angular = max(8, 2 * degree + 2 * extra)
    return area_rule(domain, n_radial, n_angular)

