"""Weight system for the kernel comparisons.

A :class:`WeightField` bundles the factor domains, base points, the
exponents ``p_j``, the fields ``phi_j``, the function ``c`` and the fiber
weight ``gamma``.  Everything else (``psi``, the interior weights and the
boundary weights) is derived from it on demand.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np
from scipy import integrate

from .geometry import (Annulus, Disc, Domain, DomainError, HarmonicField, TWO_PI,
                       contains, domain_from_dict, green, green_normal_nodes)


@dataclass(frozen=True)
class CFunction:
    """Catalog of admissible ``c``: ``constant_one`` or ``exp_decay`` (``c(t) = e^{-eps t}``)."""

    kind: str = "constant_one"
    eps: float = 0.0

    def __post_init__(self):
        if self.kind not in ("constant_one", "exp_decay"):
            raise ValueError(f"unknown c-function kind {self.kind!r}")
        if self.kind == "exp_decay" and not 0.0 <= self.eps < 1.0:
            raise ValueError(f"exp_decay needs eps in [0, 1), got {self.eps}")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "constant_one":
            return np.ones_like(t)
        with np.errstate(over="ignore", invalid="ignore"):
            return np.where(np.isinf(t), 0.0, np.exp(-self.eps * t))

    @property
    def integral_value(self) -> float:
        """Closed form of ``int_0^inf c(t) e^{-t} dt``."""
        return 1.0 if self.kind == "constant_one" else 1.0 / (1.0 + self.eps)

    def integral_numeric(self) -> float:
        val, _ = integrate.quad(lambda t: float(self(t)) * math.exp(-t), 0.0, math.inf,
                                epsabs=1e-14, epsrel=1e-13)
        return val

    def to_dict(self) -> dict:
        return {"kind": self.kind, "eps": self.eps}

    @classmethod
    def from_dict(cls, spec) -> "CFunction":
        if spec in (None, "one", "constant_one"):
            return cls()
        if isinstance(spec, str):
            raise ValueError(f"unknown c-function {spec!r}")
        kind = spec.get("kind", "constant_one")
        kind = {"one": "constant_one", "exp": "exp_decay"}.get(kind, kind)
        return cls(kind, float(spec.get("eps", 0.0)))


@dataclass(frozen=True)
class GammaWeight:
    """Fiber weight ``gamma(u) = scale * prod_k exp(-phi_k(u_k))``."""

    fields: tuple[HarmonicField, ...] = ()
    scale: float = 1.0

    def __post_init__(self):
        if not self.scale > 0:
            raise ValueError("gamma scale must be positive")

    def __call__(self, domains: Sequence[Domain], coords) -> np.ndarray:
        out = self.scale * np.ones(np.shape(coords[0]))
        for d, f, u in zip(domains, self.fields, coords):
            if not f.is_zero:
                out = out * np.exp(-f.value(d, u))
        return out

    def scaled(self, s: float) -> "GammaWeight":
        return replace(self, scale=self.scale * s)

    def to_dict(self) -> dict:
        return {"fields": [f.to_dict() for f in self.fields], "scale": self.scale}

    @classmethod
    def from_dict(cls, spec) -> "GammaWeight":
        if not spec:
            return cls()
        return cls(tuple(HarmonicField.from_dict(f) for f in spec.get("fields", [])),
                   float(spec.get("scale", 1.0)))


@dataclass(frozen=True)
class WeightField:
    """Factors ``D_1..D_n`` with base point ``z0``, exponents ``p`` and fields ``phi``.

    ``kind="single"`` means one planar domain with ``psi = p_0 G(., z_0)``;
    ``kind="product"`` means ``psi = max_j 2 p_j G_j(w_j, z_j)``.  The fiber
    ``U`` (possibly empty) carries the base point ``u0`` and weight ``gamma``.
    """

    domains: tuple[Domain, ...]
    z0: tuple[complex, ...]
    p: tuple[float, ...]
    phi: tuple[HarmonicField, ...] = ()
    c: CFunction = field(default_factory=CFunction)
    kind: str = "product"
    fiber: tuple[Domain, ...] = ()
    u0: tuple[complex, ...] = ()
    gamma: GammaWeight = field(default_factory=GammaWeight)

    def __post_init__(self):
        n = len(self.domains)
        object.__setattr__(self, "z0", tuple(complex(z) for z in self.z0))
        object.__setattr__(self, "u0", tuple(complex(u) for u in self.u0))
        object.__setattr__(self, "p", tuple(float(x) for x in self.p))
        if not self.phi:
            object.__setattr__(self, "phi", tuple(HarmonicField(center=d.center)
                                                  for d in self.domains))
        if len(self.z0) != n or len(self.p) != n or len(self.phi) != n:
            raise ValueError("domains, z0, p and phi must have one entry per factor")
        if self.kind not in ("single", "product"):
            raise ValueError(f"unknown weight-field kind {self.kind!r}")
        if self.kind == "single" and n != 1:
            raise ValueError("a single-domain weight field has exactly one factor")
        if any(x <= 0 for x in self.p):
            raise ValueError("exponents p_j must be positive")
        for d, z, f in zip(self.domains, self.z0, self.phi):
            if not contains(d, z):
                raise DomainError(f"base point {z} is not interior to {d}")
            f.validate(d)
        if len(self.u0) != len(self.fiber):
            raise ValueError("u0 needs one coordinate per fiber factor")
        for d, u in zip(self.fiber, self.u0):
            if not contains(d, u):
                raise DomainError(f"fiber base point {u} is not interior to {d}")
        if self.gamma.fields and len(self.gamma.fields) != len(self.fiber):
            raise ValueError("gamma needs one field per fiber factor")

    @property
    def n(self) -> int:
        return len(self.domains)

    @property
    def m(self) -> int:
        return len(self.fiber)

    def with_(self, **changes) -> "WeightField":
        return replace(self, **changes)

    def to_dict(self) -> dict:
        pair = lambda z: [z.real, z.imag]
        return {"kind": self.kind, "domains": [d.to_dict() for d in self.domains],
                "z0": [pair(z) for z in self.z0], "p": list(self.p),
                "phi": [f.to_dict() for f in self.phi], "c": self.c.to_dict(),
                "fiber": [d.to_dict() for d in self.fiber],
                "u0": [pair(u) for u in self.u0], "gamma": self.gamma.to_dict()}

    @classmethod
    def from_dict(cls, spec: dict) -> "WeightField":
        as_c = lambda v: complex(v[0], v[1]) if isinstance(v, (list, tuple)) else complex(v)
        domains = tuple(domain_from_dict(d) for d in spec["domains"])
        phi = tuple(HarmonicField.from_dict(f) for f in spec.get("phi", []))
        if phi:
            # a field without an explicit center expands about its domain's center
            phi = tuple(f if "center" in (s or {}) else replace(f, center=d.center)
                        for f, d, s in zip(phi, domains, spec["phi"]))
        fiber = tuple(domain_from_dict(d) for d in spec.get("fiber", []))
        return cls(domains, tuple(as_c(z) for z in spec["z0"]), tuple(spec["p"]), phi,
                   CFunction.from_dict(spec.get("c")), spec.get("kind", "product"),
                   fiber, tuple(as_c(u) for u in spec.get("u0", [])),
                   GammaWeight.from_dict(spec.get("gamma")))


def single_domain_field(domain: Domain, z0: complex, p0: float = 1.0,
                        phi: HarmonicField | None = None, c: CFunction | None = None,
                        fiber: Sequence[Domain] = (), u0: Sequence[complex] = (),
                        gamma: GammaWeight | None = None) -> WeightField:
    return WeightField((domain,), (z0,), (p0,),
                       (phi if phi is not None else HarmonicField(center=domain.center),),
                       c or CFunction(), "single", tuple(fiber), tuple(u0),
                       gamma or GammaWeight())


def product_field(domains: Sequence[Domain], z0: Sequence[complex], p: Sequence[float],
                  phi: Sequence[HarmonicField] | None = None, c: CFunction | None = None,
                  fiber: Sequence[Domain] = (), u0: Sequence[complex] = (),
                  gamma: GammaWeight | None = None) -> WeightField:
    phi = tuple(phi) if phi else tuple(HarmonicField(center=d.center) for d in domains)
    return WeightField(tuple(domains), tuple(z0), tuple(p), phi, c or CFunction(),
                       "product", tuple(fiber), tuple(u0), gamma or GammaWeight())


# ---------------------------------------------------------------------------
# derived weights


def _green_safe(domain: Domain, w, t: complex) -> np.ndarray:
    w = np.asarray(w, dtype=complex)
    out = np.full(w.shape, -np.inf)
    mask = w != t
    if np.any(mask):
        out[mask] = green(domain, w[mask], t)
    return out


def psi(field: WeightField, w) -> np.ndarray:
    """``p_0 G(w, z_0)`` (single domain) or ``max_j 2 p_j G_j(w_j, z_j)`` (product).

    Returns ``-inf`` at the base point.
    """
    coords = _coords(field, w)
    if field.kind == "single":
        return field.p[0] * _green_safe(field.domains[0], coords[0], field.z0[0])
    vals = [2.0 * p * _green_safe(d, wj, z)
            for d, wj, z, p in zip(field.domains, coords, field.z0, field.p)]
    return np.maximum.reduce(vals) if len(vals) > 1 else vals[0]


def _coords(field: WeightField, w):
    if field.n == 1 and (np.ndim(w) == 0 or not isinstance(w, (tuple, list))):
        return [np.asarray(w, dtype=complex)]
    if len(w) != field.n:
        raise ValueError(f"expected {field.n} coordinates, got {len(w)}")
    return [np.asarray(x, dtype=complex) for x in w]


def exp_minus_phi(field: WeightField, coords, factors: Sequence[int] | None = None):
    """``prod_l exp(-phi_l(w_l))`` over the chosen factors (all by default)."""
    factors = range(field.n) if factors is None else factors
    out = np.ones(np.shape(coords[0]))
    for j in factors:
        f = field.phi[j]
        if not f.is_zero:
            out = out * np.exp(-f.value(field.domains[j], coords[j]))
    return out


def rho_interior(field: WeightField, w) -> np.ndarray:
    """Interior area weight.

    Single domain: ``exp(-phi) c(-2 psi)``.  Product: ``c(-psi) prod exp(-phi_j)``.
    """
    coords = _coords(field, w)
    ps = psi(field, coords)
    arg = -2.0 * ps if field.kind == "single" else -ps
    return field.c(arg) * exp_minus_phi(field, coords)


def boundary_normal_derivative(field: WeightField, j: int, z) -> np.ndarray:
    """``dG_j(., z_j)/dnu`` at boundary points ``z`` of factor ``j``."""
    d = field.domains[j]
    z = np.asarray(z, dtype=complex)
    rel = z - d.center
    radius = np.abs(rel)
    comp = np.where(np.abs(radius - d.outer_radius) <= np.abs(radius - d.inner_radius), 0, 1)
    return green_normal_nodes(d, comp, np.angle(rel) % TWO_PI, field.z0[j])


def lambda_single(field: WeightField, z) -> np.ndarray:
    """Single-domain boundary weight ``e^{-phi} (p_0 dG/dnu)^{-1}``.

    On the boundary ``psi = 0`` so ``c(-2 psi) = c(0) = 1``.
    """
    if field.kind != "single":
        raise ValueError("lambda_single needs a single-domain weight field")
    z = np.asarray(z, dtype=complex)
    dgdn = boundary_normal_derivative(field, 0, z)
    return exp_minus_phi(field, [z]) / (field.p[0] * dgdn)


def rho_boundary_face(field: WeightField, j: int, coords) -> np.ndarray:
    """Weight on the face ``dD_j x M_j``: ``(1/p_j)(dG_j/dnu)^{-1} prod_l e^{-phi_l}``."""
    if not 0 <= j < field.n:
        raise IndexError(f"factor index {j} out of range")
    dgdn = boundary_normal_derivative(field, j, coords[j])
    return exp_minus_phi(field, coords) / (field.p[j] * dgdn)


def lambda_distinguished(field: WeightField, coords) -> np.ndarray:
    """Weight on ``S = prod dD_j``: ``prod_j (dG_j/dnu)^{-1} e^{-phi_j}``."""
    out = exp_minus_phi(field, coords)
    for j in range(field.n):
        out = out / boundary_normal_derivative(field, j, coords[j])
    return out


def lambda_boundary(field: WeightField, w, j: int = 0, which: str | None = None) -> np.ndarray:
    """Dispatch to the boundary weight requested.

    ``which`` is ``"single"`` (one domain), ``"face"`` (product weight on
    ``dD_j x M_j``) or ``"distinguished"`` (the weight on ``S``).  By default
    a single-domain field gives ``"single"`` and a product field ``"face"``.
    """
    which = which or ("single" if field.kind == "single" else "face")
    if which == "single":
        if j != 0:
            raise IndexError("a single domain has only factor 0")
        return lambda_single(field, w)
    coords = _coords(field, w)
    if which == "face":
        return rho_boundary_face(field, j, coords)
    if which == "distinguished":
        return lambda_distinguished(field, coords)
    raise ValueError(f"unknown boundary weight {which!r}")


def gamma_weight(field: WeightField, u_coords) -> np.ndarray:
    return field.gamma(field.fiber, u_coords)


# ---------------------------------------------------------------------------
# diagnostics


@dataclass(frozen=True)
class AdmissibilityReport:
    exponent: float
    integrals: tuple[float, ...]
    passed: bool
    threshold: float


def admissibility_check(weight_values, rule, a: float, refinements: Sequence | None = None,
                        threshold: float = 1e8, growth: float = 1.5) -> AdmissibilityReport:
    """Numerically integrate ``weight^{-a}``; advisory only.

    ``refinements`` is an optional list of ``(weight_values, rule)`` pairs at
    increasing resolution.  The check fails when any integral is non-finite or
    above ``threshold``, or when successive refinements keep growing by more
    than the factor ``growth`` (the sampled trend of a divergent integral).
    """
    if not a > 0:
        raise ValueError("exponent a must be positive")
    pairs = [(weight_values, rule)] + list(refinements or [])
    vals = []
    for wv, r in pairs:
        wv = np.asarray(wv, dtype=float)
        with np.errstate(divide="ignore", over="ignore"):
            vals.append(float(np.sum(r.weights * wv ** (-a))))
    ok = all(np.isfinite(v) and v < threshold for v in vals)
    if ok and len(vals) >= 3:
        ratios = [vals[i + 1] / vals[i] for i in range(len(vals) - 1)]
        if all(x > growth for x in ratios[-2:]):
            ok = False
    return AdmissibilityReport(a, tuple(vals), ok, threshold)


@dataclass(frozen=True)
class JetAdmissibility:
    admissible: bool
    equality: bool
    total: float


def jet_admissibility(p: Sequence[float], beta_tilde: Sequence[int],
                      tol: float = 1e-12) -> JetAdmissibility:
    """``sum_j (beta~_j + 1)/p_j <= 1``; ``equality`` flags the boundary case."""
    if len(p) != len(beta_tilde):
        raise ValueError("p and beta_tilde have different lengths")
    total = math.fsum((b + 1) / x for b, x in zip(beta_tilde, p))
    return JetAdmissibility(total <= 1.0 + tol, abs(total - 1.0) <= tol, total)


def lelong_phi_plus_2psi(field: WeightField) -> float:
    """Lelong number of ``phi + 2 psi`` at ``z0`` for a single-domain field."""
    return field.phi[0].lelong(field.z0[0]) + 2.0 * field.p[0]


__all__ = ["CFunction", "GammaWeight", "WeightField", "single_domain_field", "product_field",
           "psi", "rho_interior", "lambda_boundary", "lambda_single", "rho_boundary_face",
           "lambda_distinguished", "exp_minus_phi", "gamma_weight", "admissibility_check",
           "jet_admissibility", "AdmissibilityReport", "JetAdmissibility",
           "lelong_phi_plus_2psi", "Disc", "Annulus"]
