"""Planar domains, Green functions and boundary potential theory.

Only discs and annuli (and their affine images) are supported.  The disc
Green function is the Moebius closed form; the annulus Green function is
the reflected-image product

    G(z, t) = log|P(z/t) / P(z conj(t))| + log|t| - log|z| log|t| / log q

in normalized coordinates (outer radius 1, inner radius q), where
``P(x) = (1 - x) prod_k (1 - q^{2k} x)(1 - q^{2k} / x)``.  The product is
truncated once its certified geometric tail drops below ``GREEN_TOL``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

GREEN_TOL = 1e-13
TWO_PI = 2.0 * math.pi


class DomainError(ValueError):
    """A point lies outside the closure of a domain, or a domain is malformed."""


class SingularityError(ValueError):
    """Evaluation requested at the logarithmic pole of a Green function."""


class ConditioningWarning(UserWarning):
    pass


@dataclass(frozen=True)
class Disc:
    center: complex = 0j
    radius: float = 1.0

    kind = "disc"

    def __post_init__(self):
        if not self.radius > 0:
            raise DomainError(f"disc radius must be positive, got {self.radius}")
        object.__setattr__(self, "center", complex(self.center))
        object.__setattr__(self, "radius", float(self.radius))

    @property
    def n_components(self) -> int:
        return 1

    @property
    def outer_radius(self) -> float:
        return self.radius

    @property
    def inner_radius(self) -> float:
        return 0.0

    def component_radius(self, component: int) -> float:
        _check_component(self, component)
        return self.radius

    def boundary_length(self) -> float:
        return TWO_PI * self.radius

    def area(self) -> float:
        return math.pi * self.radius**2

    def to_dict(self) -> dict:
        return {"kind": "disc", "center": [self.center.real, self.center.imag],
                "radius": self.radius}


@dataclass(frozen=True)
class Annulus:
    center: complex = 0j
    r_inner: float = 0.5
    r_outer: float = 1.0

    kind = "annulus"

    def __post_init__(self):
        if not (0 < self.r_inner < self.r_outer):
            raise DomainError(
                f"annulus needs 0 < r_inner < r_outer, got {self.r_inner}, {self.r_outer}")
        object.__setattr__(self, "center", complex(self.center))
        object.__setattr__(self, "r_inner", float(self.r_inner))
        object.__setattr__(self, "r_outer", float(self.r_outer))

    @property
    def n_components(self) -> int:
        return 2

    @property
    def outer_radius(self) -> float:
        return self.r_outer

    @property
    def inner_radius(self) -> float:
        return self.r_inner

    @property
    def modulus(self) -> float:
        """Ratio ``q = r_inner / r_outer`` of the normalized annulus."""
        return self.r_inner / self.r_outer

    def component_radius(self, component: int) -> float:
        _check_component(self, component)
        return self.r_outer if component == 0 else self.r_inner

    def boundary_length(self) -> float:
        return TWO_PI * (self.r_outer + self.r_inner)

    def area(self) -> float:
        return math.pi * (self.r_outer**2 - self.r_inner**2)

    def to_dict(self) -> dict:
        return {"kind": "annulus", "center": [self.center.real, self.center.imag],
                "r_inner": self.r_inner, "r_outer": self.r_outer}


Domain = Disc | Annulus


def domain_from_dict(spec: dict) -> Domain:
    kind = spec.get("kind")
    center = spec.get("center", [0.0, 0.0])
    center = complex(center[0], center[1]) if isinstance(center, (list, tuple)) else complex(center)
    if kind == "disc":
        return Disc(center, spec.get("radius", 1.0))
    if kind == "annulus":
        return Annulus(center, spec.get("r_inner", 0.5), spec.get("r_outer", 1.0))
    raise DomainError(f"unknown domain kind {kind!r}")


def _check_component(domain: Domain, component: int) -> None:
    if not 0 <= component < domain.n_components:
        raise IndexError(
            f"component {component} out of range for {domain.kind} "
            f"with {domain.n_components} boundary component(s)")


# boundary parameterization; component 0 is the outer circle, 1 the inner one

def boundary_point(domain: Domain, component: int, s):
    """Position on boundary component ``component`` at parameter ``s``."""
    r = domain.component_radius(component)
    return domain.center + r * np.exp(1j * np.asarray(s, dtype=float))


def outward_normal(domain: Domain, component: int, s):
    """Outward unit normal; it points towards the center on the inner circle."""
    _check_component(domain, component)
    sign = 1.0 if component == 0 else -1.0
    return sign * np.exp(1j * np.asarray(s, dtype=float))


def arclength_element(domain: Domain, component: int) -> float:
    """``|dz/ds|`` for the angular parameterization (constant on circles)."""
    return domain.component_radius(component)


@dataclass(frozen=True)
class BoundaryPoint:
    component: int
    s: float
    z: complex = field(default=complex("nan"))

    @classmethod
    def at(cls, domain: Domain, component: int, s: float) -> "BoundaryPoint":
        return cls(component, float(s) % TWO_PI, complex(boundary_point(domain, component, s)))


SHIFT_THRESHOLD = 0.5


def automorphism_shift(domain: Domain, point: complex | None,
                       threshold: float = SHIFT_THRESHOLD) -> complex:
    """Normalized position ``b = (point - c)/R`` of a disc base point.

    Bases and quadrature are re-centered by the disc automorphism taking 0
    to ``b`` once ``|b| >= threshold``; closer to the center plain monomials
    converge like ``|b|^(2N)`` and 0 is returned.
    """
    if point is None or not isinstance(domain, Disc):
        return 0j
    b = (complex(point) - domain.center) / domain.radius
    return b if abs(b) >= threshold else 0j


def distance_to_boundary(domain: Domain, z) -> np.ndarray:
    """Signed distance, positive inside."""
    r = np.abs(np.asarray(z) - domain.center)
    d = domain.outer_radius - r
    if isinstance(domain, Annulus):
        d = np.minimum(d, r - domain.r_inner)
    return d


def contains(domain: Domain, z, closed: bool = False, tol: float = 1e-12) -> np.ndarray:
    d = distance_to_boundary(domain, z)
    return d >= -tol if closed else d > 0


def _normalize(domain: Domain, z) -> np.ndarray:
    return (np.asarray(z, dtype=complex) - domain.center) / domain.outer_radius


# ---------------------------------------------------------------------------
# Green functions


def image_terms(q: float, tol: float = GREEN_TOL) -> int:
    """Number of reflected-image factors so that the tail bound is below ``tol``.

    Each discarded factor satisfies ``|log|1 - x|| <= |x| / (1 - |x|)`` with
    ``|x| <= q^{2k-2}``; summing the four families gives the bound
    ``4 q^{2K} / ((1 - q^2)(1 - q^{2K}))``.
    """
    if not 0 < q < 1:
        raise DomainError(f"annulus modulus must lie in (0, 1), got {q}")
    k = 1
    while green_tail_bound(q, k) >= tol:
        k += 1
    return k


def green_tail_bound(q: float, k: int) -> float:
    x = q ** (2 * k)
    return 4.0 * x / ((1.0 - q * q) * (1.0 - x))


def _log_abs_prime(x: np.ndarray, q: float, terms: int) -> np.ndarray:
    out = np.log(np.abs(1.0 - x))
    for k in range(1, terms + 1):
        qk = q ** (2 * k)
        out += np.log(np.abs(1.0 - qk * x)) + np.log(np.abs(1.0 - qk / x))
    return out


def _dlog_prime(x: np.ndarray, q: float, terms: int) -> np.ndarray:
    out = -1.0 / (1.0 - x)
    for k in range(1, terms + 1):
        qk = q ** (2 * k)
        out += -qk / (1.0 - qk * x) + qk / (x * x) / (1.0 - qk / x)
    return out


def _check_pole(domain: Domain, t: complex) -> complex:
    t = complex(t)
    if not contains(domain, t):
        raise DomainError(f"pole {t} is not an interior point of the {domain.kind}")
    return t


def _check_points(domain: Domain, z: np.ndarray, t: complex, tol: float = 1e-12) -> None:
    if not np.all(contains(domain, z, closed=True, tol=tol)):
        raise DomainError(f"evaluation point outside the closed {domain.kind}")
    if np.any(np.abs(z - t) == 0):
        raise SingularityError(f"Green function evaluated at its pole {t}")


def green(domain: Domain, z, t: complex):
    """Green function ``G_D(z, t)``: non-positive, zero on the boundary,
    ``log|z - t|`` singularity at the pole ``t``.

    Vectorized over ``z``.
    """
    t = _check_pole(domain, t)
    zz = np.asarray(z, dtype=complex)
    _check_points(domain, zz, t)
    zeta, tau = _normalize(domain, zz), complex(_normalize(domain, t))
    if isinstance(domain, Disc):
        val = np.log(np.abs(zeta - tau)) - np.log(np.abs(1.0 - zeta * tau.conjugate()))
    else:
        q = domain.modulus
        terms = image_terms(q)
        log_tau = math.log(abs(tau))
        val = (_log_abs_prime(zeta / tau, q, terms)
               - _log_abs_prime(zeta * tau.conjugate(), q, terms)
               + log_tau - np.log(np.abs(zeta)) * log_tau / math.log(q))
    # boundary values are exactly zero; clip roundoff of the wrong sign
    val = np.minimum(val, 0.0)
    return val if val.ndim else float(val)


def green_gradient(domain: Domain, z, t: complex):
    """Complex gradient ``dG/dx + i dG/dy`` of ``G_D(., t)`` at ``z``."""
    t = _check_pole(domain, t)
    zz = np.asarray(z, dtype=complex)
    _check_points(domain, zz, t)
    scale = domain.outer_radius
    zeta, tau = _normalize(domain, zz), complex(_normalize(domain, t))
    if isinstance(domain, Disc):
        dF = 1.0 / (zeta - tau) + tau.conjugate() / (1.0 - zeta * tau.conjugate())
    else:
        q = domain.modulus
        terms = image_terms(q)
        dF = (_dlog_prime(zeta / tau, q, terms) / tau
              - tau.conjugate() * _dlog_prime(zeta * tau.conjugate(), q, terms)
              - math.log(abs(tau)) / math.log(q) / zeta)
    return np.conj(dF) / scale


def _normal_derivative(domain: Domain, z, normal, t: complex) -> np.ndarray:
    grad = green_gradient(domain, z, t)
    return np.real(grad * np.conj(normal))


def _annulus_normal(domain: Annulus, component: int, s, t: complex) -> np.ndarray:
    """``dG/dnu`` on an annulus from the periodized Poisson kernel of the log-strip.

    ``w = log(z - c)`` maps the annulus onto the strip ``log r < Re w < log R``
    modulo ``2 pi i``; the strip kernel is a sum of positive terms, so values
    many orders below the maximum keep full relative accuracy, unlike the
    gradient of the image product which cancels there.
    """
    h = -math.log(domain.modulus)
    rel = complex(t) - domain.center
    a = math.pi * math.log(abs(rel) / domain.r_inner) / h
    sgn = 1.0 if component == 0 else -1.0
    d = np.angle(np.exp(1j * (np.asarray(s, dtype=float) - math.atan2(rel.imag, rel.real))))
    kmax = int(math.ceil(40.0 * h / (2 * math.pi ** 2))) + 1
    k = np.arange(-kmax, kmax + 1)
    with np.errstate(over="ignore"):
        ch = np.cosh(math.pi * (d[..., None] + TWO_PI * k) / h)
    total = np.sum(1.0 / (ch + sgn * math.cos(a)), axis=-1)
    return math.pi * math.sin(a) / h * total / domain.component_radius(component)


def green_normal(domain: Domain, b: BoundaryPoint, t: complex) -> float:
    """Outward normal derivative of ``G_D(., t)`` at the boundary point ``b``."""
    t = _check_pole(domain, t)
    d = float(distance_to_boundary(domain, t))
    if d < 0.05 * domain.outer_radius:
        warnings.warn(f"pole {t} lies within {d:.3g} of the boundary; "
                      "normal derivative is badly conditioned", ConditioningWarning)
    if isinstance(domain, Annulus):
        return float(_annulus_normal(domain, b.component, b.s, t))
    z = boundary_point(domain, b.component, b.s)
    n = outward_normal(domain, b.component, b.s)
    return float(_normal_derivative(domain, z, n, t))


def green_normal_nodes(domain: Domain, components, s, t: complex) -> np.ndarray:
    """Vectorized ``green_normal`` over parameter arrays ``(components, s)``."""
    components = np.asarray(components)
    s = np.asarray(s, dtype=float)
    out = np.empty(s.shape)
    for c in np.unique(components):
        mask = components == c
        if isinstance(domain, Annulus):
            out[mask] = _annulus_normal(domain, int(c), s[mask], t)
            continue
        z = boundary_point(domain, int(c), s[mask])
        n = outward_normal(domain, int(c), s[mask])
        out[mask] = _normal_derivative(domain, z, n, t)
    return out


def harmonic_measure_inner(domain: Annulus, t: complex) -> float:
    """Harmonic measure of the inner circle seen from ``t``."""
    r = abs(complex(t) - domain.center)
    return math.log(r / domain.r_outer) / math.log(domain.modulus)


# ---------------------------------------------------------------------------
# harmonic fields


@dataclass(frozen=True)
class HarmonicField:
    """Real field ``Re(sum_n poly[n] (z-c)^n) + log_coef log|z-c| + sum_k a_k G(z, t_k)``.

    With ``green`` empty the field is harmonic on an annulus centered at ``c``
    (and on a disc when ``log_coef == 0``).  Green terms with ``a_k >= 0``
    make it subharmonic.
    """

    poly: tuple[complex, ...] = ()
    log_coef: float = 0.0
    green: tuple[tuple[float, complex], ...] = ()
    center: complex = 0j

    def __post_init__(self):
        object.__setattr__(self, "poly", tuple(complex(a) for a in self.poly))
        object.__setattr__(self, "green",
                           tuple((float(a), complex(p)) for a, p in self.green))
        object.__setattr__(self, "center", complex(self.center))
        object.__setattr__(self, "log_coef", float(self.log_coef))

    @property
    def is_harmonic(self) -> bool:
        return not any(a != 0 for a, _ in self.green)

    @property
    def is_subharmonic(self) -> bool:
        return all(a >= 0 for a, _ in self.green)

    @property
    def is_zero(self) -> bool:
        return not any(self.poly) and self.log_coef == 0 and self.is_harmonic

    def lelong(self, point: complex, tol: float = 1e-12) -> float:
        """Lelong number of ``dd^c`` of the field at ``point``."""
        return sum(a for a, p in self.green if abs(p - point) <= tol)

    def shifted(self, alpha: float) -> "HarmonicField":
        poly = list(self.poly) or [0j]
        poly[0] += alpha
        return HarmonicField(tuple(poly), self.log_coef, self.green, self.center)

    def plus(self, other: "HarmonicField") -> "HarmonicField":
        if self.center != other.center and (other.poly or other.log_coef):
            raise ValueError("fields expanded about different centers")
        n = max(len(self.poly), len(other.poly))
        poly = [(self.poly[i] if i < len(self.poly) else 0)
                + (other.poly[i] if i < len(other.poly) else 0) for i in range(n)]
        return HarmonicField(tuple(poly), self.log_coef + other.log_coef,
                             self.green + other.green, self.center)

    def validate(self, domain: Domain) -> None:
        if self.log_coef and isinstance(domain, Disc) and contains(domain, self.center):
            raise DomainError("log|z - c| term is singular inside the disc")
        if self.log_coef and isinstance(domain, Annulus) and self.center != domain.center:
            raise DomainError("log term must be centered at the annulus hole")
        for _, p in self.green:
            _check_pole(domain, p)

    def value(self, domain: Domain, z):
        z = np.asarray(z, dtype=complex)
        w = z - self.center
        out = np.zeros(z.shape)
        if self.poly:
            out = out + np.real(np.polyval(self.poly[::-1], w))
        if self.log_coef:
            out = out + self.log_coef * np.log(np.abs(w))
        for a, p in self.green:
            if a:
                out = out + a * green(domain, z, p)
        return out

    def gradient(self, domain: Domain, z):
        z = np.asarray(z, dtype=complex)
        w = z - self.center
        dF = np.zeros(z.shape, dtype=complex)
        if len(self.poly) > 1:
            deriv = [n * self.poly[n] for n in range(1, len(self.poly))]
            dF = dF + np.polyval(deriv[::-1], w)
        if self.log_coef:
            dF = dF + self.log_coef / w
        grad = np.conj(dF)
        for a, p in self.green:
            if a:
                grad = grad + a * green_gradient(domain, z, p)
        return grad

    def to_dict(self) -> dict:
        return {"poly": [[a.real, a.imag] for a in self.poly], "log_coef": self.log_coef,
                "green": [[a, [p.real, p.imag]] for a, p in self.green],
                "center": [self.center.real, self.center.imag]}

    @classmethod
    def from_dict(cls, spec: dict | None) -> "HarmonicField":
        if not spec:
            return cls()
        as_c = lambda v: complex(v[0], v[1]) if isinstance(v, (list, tuple)) else complex(v)
        return cls(tuple(as_c(a) for a in spec.get("poly", [])),
                   float(spec.get("log_coef", 0.0)),
                   tuple((float(a), as_c(p)) for a, p in spec.get("green", [])),
                   as_c(spec.get("center", [0.0, 0.0])))


def green_field(t: complex, coef: float = 1.0) -> HarmonicField:
    return HarmonicField(green=((coef, t),))


def harmonic_flux(domain: Domain, u: HarmonicField, component: int, n_nodes: int = 512) -> float:
    """Signed period ``oint du/dnu ds`` over one boundary component.

    This is the period of the harmonic conjugate of ``u`` around that
    component; ``exp(i * period)`` is the character of the multiplicative
    function ``f`` with ``|f| = exp(u)``.
    """
    _check_component(domain, component)
    u.validate(domain)
    s = TWO_PI * np.arange(n_nodes) / n_nodes
    z = boundary_point(domain, component, s)
    n = outward_normal(domain, component, s)
    dudn = np.real(u.gradient(domain, z) * np.conj(n))
    return float(np.sum(dudn) * TWO_PI / n_nodes * arclength_element(domain, component))


def flux_vector(domain: Domain, u: HarmonicField, n_nodes: int = 512) -> np.ndarray:
    return np.array([harmonic_flux(domain, u, c, n_nodes) for c in range(domain.n_components)])


def period_gap(a: float, b: float) -> float:
    """Distance between two periods modulo ``2 pi``."""
    d = (a - b) % TWO_PI
    return min(d, TWO_PI - d)


def characters_match(domain: Domain, u: HarmonicField, v: HarmonicField,
                     tol: float = 1e-8, n_nodes: int = 512) -> bool:
    fu, fv = flux_vector(domain, u, n_nodes), flux_vector(domain, v, n_nodes)
    return all(period_gap(a, b) <= tol for a, b in zip(fu, fv))


# ---------------------------------------------------------------------------
# boundary reproduction and Hardy norms


def poisson_reproduce(domain: Domain, boundary_values, t: complex, rule) -> complex:
    """``(1/2pi) oint f dG/dnu |dz|`` on a boundary quadrature rule."""
    values = np.asarray(boundary_values)
    if values.shape != rule.weights.shape:
        raise ValueError(f"{values.size} boundary samples for a rule with {rule.size} nodes")
    dgdn = green_normal_nodes(domain, rule.components, rule.params, t)
    return complex(np.sum(rule.weights * values * dgdn) / TWO_PI)


def _level_curves_disc(domain: Disc, t: complex, level: float, n: int):
    # G(z,t) = log|m(z)|, m Moebius; the level curve is m^{-1}(e^{level} e^{i theta})
    tau = complex(_normalize(domain, t))
    theta = TWO_PI * np.arange(n) / n
    w = math.exp(level) * np.exp(1j * theta)
    zeta = (w + tau) / (1 + tau.conjugate() * w)
    return [domain.center + domain.radius * zeta]


def _radial_roots(domain: Annulus, t: complex, level: float, theta: np.ndarray):
    """Inner and outer radii where the ray at angle ``theta`` meets ``{G = level}``."""
    from scipy.optimize import brentq

    lo, hi = domain.r_inner, domain.r_outer
    grid = np.linspace(lo, hi, 65)[1:-1]
    inner, outer = np.empty(theta.size), np.empty(theta.size)
    for i, th in enumerate(theta):
        ray = domain.center + np.exp(1j * th) * grid
        hit = np.abs(ray - t) < 1e-12
        g = np.full(grid.size, -np.inf)
        g[~hit] = green(domain, ray[~hit], t)
        if not np.any(g < level):
            return None
        below = np.nonzero(g < level)[0]
        if np.any(np.diff(below) != 1):
            return None
        f = lambda r: green(domain, domain.center + r * np.exp(1j * th), t) - level
        a, b = below[0], below[-1]
        inner[i] = brentq(f, lo, grid[a], xtol=1e-15, rtol=1e-15) if a == 0 else \
            brentq(f, grid[a - 1], grid[a], xtol=1e-15, rtol=1e-15)
        outer[i] = brentq(f, grid[b], hi, xtol=1e-15, rtol=1e-15) if b == grid.size - 1 else \
            brentq(f, grid[b], grid[b + 1], xtol=1e-15, rtol=1e-15)
    return inner, outer


def hardy_norm_exhaustion(domain: Domain, f: Callable, t: complex, levels: int,
                          n_nodes: int = 256, k_start: int = 2) -> np.ndarray:
    """Squared Hardy norms of ``f`` over the exhaustion ``D_k = {G(., t) < log(1 - 1/k)}``.

    Entry ``i`` uses ``k = k_start + i``; each value is the harmonic-measure
    average ``(1/2pi) oint |f|^2 dG/dnu |dz|`` over the level curve, which is
    what the Green function of ``D_k`` (a shift of ``G(., t)``) produces.
    On an annulus ``k_start`` is raised until every level set is a ring of two
    star-shaped curves.
    """
    t = _check_pole(domain, t)
    out = []
    k = k_start
    if isinstance(domain, Annulus):
        k = max(k, _first_ring_index(domain, t, n_nodes))
    while len(out) < levels:
        level = math.log(1.0 - 1.0 / k)
        if isinstance(domain, Disc):
            (z,) = _level_curves_disc(domain, t, level, n_nodes)
            out.append(float(np.mean(np.abs(f(z)) ** 2)))
        else:
            val = _annulus_level_average(domain, f, t, level, n_nodes)
            if val is None:
                if out:
                    raise RuntimeError("exhaustion level set lost its ring shape")
                if k > k_start + 1000:
                    raise RuntimeError("no ring-shaped level set found")
            else:
                out.append(val)
        k += 1
    return np.array(out)


def _first_ring_index(domain: Annulus, t: complex, n: int) -> int:
    """Smallest ``k`` whose level ``log(1 - 1/k)`` lies above the saddle of ``G(., t)``.

    Below the saddle the sublevel set is a disc around ``t``; above it the
    set wraps around the hole and its boundary is two closed curves.
    """
    theta = TWO_PI * np.arange(n) / n
    grid = np.linspace(domain.r_inner, domain.r_outer, 65)[1:-1]
    z = domain.center + np.outer(np.exp(1j * theta), grid)
    g = np.full(z.shape, -np.inf)
    ok = np.abs(z - t) > 1e-12
    g[ok] = green(domain, z[ok], t)
    saddle = float(np.max(np.min(g, axis=1)))
    return int(math.ceil(1.0 / -math.expm1(saddle))) + 1


def _annulus_level_average(domain: Annulus, f, t, level, n):
    theta = TWO_PI * np.arange(n) / n
    roots = _radial_roots(domain, t, level, theta)
    if roots is None:
        return None
    total = 0.0
    for radii in roots:
        e = np.exp(1j * theta)
        z = domain.center + radii * e
        grad = green_gradient(domain, z, t)
        g_r = np.real(grad * np.conj(e))
        g_th = radii * np.real(grad * np.conj(1j * e))
        dr = -g_th / g_r
        dz = (dr + 1j * radii) * e
        flux = np.abs(grad) * np.abs(dz)
        total += np.sum(np.abs(f(z)) ** 2 * flux) * TWO_PI / n
    return float(total / TWO_PI)


def sample_interior(domain: Domain, rng: np.random.Generator, size: int,
                    margin: float = 0.1) -> np.ndarray:
    """Random interior points kept ``margin * outer_radius`` away from the boundary."""
    lo = domain.inner_radius + margin * domain.outer_radius
    hi = domain.outer_radius * (1.0 - margin)
    r = np.sqrt(rng.uniform(lo**2, hi**2, size))
    return domain.center + r * np.exp(1j * rng.uniform(0, TWO_PI, size))


def as_points(domains: Sequence[Domain], point) -> tuple[complex, ...]:
    """Normalize a point of a product domain into a tuple of complex coordinates."""
    if np.isscalar(point):
        point = (point,)
    point = tuple(complex(p) for p in point)
    if len(point) != len(domains):
        raise ValueError(f"point has {len(point)} coordinates, product has {len(domains)} factors")
    for d, p in zip(domains, point):
        if not contains(d, p):
            raise DomainError(f"{p} is not interior to {d}")
    return point
