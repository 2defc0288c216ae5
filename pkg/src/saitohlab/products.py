"""Kernels on product and fibration spaces and their decomposition identities.

Measure selectors:

``dD``     boundary of one planar domain, weight ``lambda``
``dD_U``   ``dD x U`` with weight ``lambda * gamma``
``M``      area of ``M = prod D_j`` (or of one domain), weight ``rho`` / ``rho~``
``M_U``    area of ``M x U`` with weight ``rho~ * gamma``
``dM``     the mixed boundary ``sum_j (1/2pi) int_{M_j} int_{dD_j}`` with weight ``rho``
``dM_U``   ``dM x U`` with weight ``rho * gamma``
``S``      distinguished boundary with ``(2pi)^{-n} prod |dw_j|`` and weight ``lambda``
``S_U``    ``S x U`` with weight ``lambda * gamma``
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .geometry import (SHIFT_THRESHOLD, Annulus, Disc, Domain, HarmonicField, TWO_PI,
                       sample_interior)
from .integration import (area_rule, boundary_rule, distinguished_normalization,
                          kinked_polydisc_rules, moebius_rule, pullback_extra_nodes)
from .kernels import (DESIGN_ENTRIES, BasisSpec, ExtremalResult, FactorBasis, GramMatrix,
                      JetIdeal, MeasureTerm, OrthonormalBasis, assemble_gram,
                      constrained_min_norm, kernel_eval, multi_indices, orthonormalize,
                      orthonormalize_design)
from .weights import (GammaWeight, WeightField, boundary_normal_derivative, product_field,
                      single_domain_field,
                      lambda_distinguished, lambda_single, rho_boundary_face, rho_interior)

SELECTORS = ("dD", "dD_U", "M", "M_U", "dM", "dM_U", "S", "S_U")
FACTORED = {"dD_U": "dD", "M_U": "M", "dM_U": "dM", "S_U": "S"}
ALIASES = {"∂D×U": "dD_U", "∂D": "dD", "∂M": "dM", "∂M×U": "dM_U", "S×U": "S_U",
           "M×U": "M_U"}

IDENTITIES = {
    "3:E4": ("dD_U", False),
    "3:E8": ("M_U", False),
    "Pro-28": ("dM_U", False),
    "key-decomp1": ("S_U", False),
    "Berg-decomp": ("M_U", True),
    "eq-1": ("dM_U", True),
    "S-decomp": ("S_U", True),
}


@dataclass(frozen=True)
class Resolution:
    """Basis degrees and quadrature sizes.

    ``None`` sizes are derived from the degrees so that products of basis
    functions are integrated with a comfortable margin.
    """

    degree: int = 6
    fiber_degree: int = 3
    boundary_nodes: int | None = None
    area_radial: int | None = None
    area_angular: int | None = None
    factor_degrees: tuple[int, ...] | None = None

    def degree_of(self, j: int) -> int:
        return self.factor_degrees[j] if self.factor_degrees else self.degree

    def nodes(self, degree: int) -> tuple[int, int, int]:
        nb = self.boundary_nodes or max(32, 4 * degree + 16)
        nr = self.area_radial or max(4, degree + 6)
        na = self.area_angular or max(8, 2 * degree + 12)
        return nb, nr, na

    def fiber_nodes(self) -> tuple[int, int]:
        k = self.fiber_degree
        return max(4, k + 6), max(8, 2 * k + 12)

    def doubled(self) -> "Resolution":
        dbl = lambda x: None if x is None else 2 * x
        fd = tuple(2 * d for d in self.factor_degrees) if self.factor_degrees else None
        return Resolution(2 * self.degree, 2 * self.fiber_degree, dbl(self.boundary_nodes),
                          dbl(self.area_radial), dbl(self.area_angular), fd)

    def to_dict(self) -> dict:
        nb, nr, na = self.nodes(self.degree)
        fr, fa = self.fiber_nodes()
        return {"degree": self.degree, "factor_degrees": list(self.factor_degrees or []),
                "fiber_degree": self.fiber_degree,
                "boundary_nodes": nb, "area_radial": nr, "area_angular": na,
                "fiber_radial": fr, "fiber_angular": fa}


@dataclass(frozen=True)
class ProductSpaceSpec:
    field: WeightField
    selector: str
    resolution: Resolution = field(default_factory=Resolution)

    def __post_init__(self):
        sel = ALIASES.get(self.selector, self.selector)
        object.__setattr__(self, "selector", sel)
        if sel not in SELECTORS:
            raise ValueError(f"unknown measure selector {self.selector!r}")
        has_fiber = sel.endswith("_U")
        if has_fiber and not self.field.fiber:
            raise ValueError(f"selector {sel} needs a fiber domain U")
        if not has_fiber and self.field.fiber:
            raise ValueError(f"selector {sel} has no fiber but the weight field carries one")
        if sel.startswith("dD") and self.field.kind != "single":
            raise ValueError(f"selector {sel} needs a single-domain weight field")
        if sel.startswith(("dM", "S")) and self.field.kind != "product":
            raise ValueError(f"selector {sel} needs a product weight field")

    @property
    def n(self) -> int:
        return self.field.n

    @property
    def m(self) -> int:
        return self.field.m

    @property
    def base_point(self) -> tuple[complex, ...]:
        return self.field.z0 + self.field.u0

    def base(self) -> "ProductSpaceSpec":
        """The same space without its fiber factor."""
        sel = FACTORED.get(self.selector, self.selector)
        f = self.field.with_(fiber=(), u0=(), gamma=GammaWeight())
        return ProductSpaceSpec(f, sel, self.resolution)

    def with_resolution(self, resolution: Resolution) -> "ProductSpaceSpec":
        return replace(self, resolution=resolution)

    def sizes(self) -> dict:
        out = self.resolution.to_dict()
        out["basis_dim"] = int(np.prod([f.size for f in self.basis().factors]))
        return out

    @property
    def kinked(self) -> bool:
        """Area measure whose weight ``c(-2 psi)`` kinks where ``max_j`` switches."""
        f = self.field
        return (self.selector in ("M", "M_U") and f.kind == "product" and f.n > 1
                and f.c.kind != "constant_one" and all(isinstance(d, Disc) for d in f.domains))

    def shift_threshold(self, j: int) -> float:
        """Base-point offset from which factor ``j`` uses automorphism coordinates.

        Weights radial in those coordinates (``phi_j = 0``, ``gamma = 1``)
        are integrated exactly there at any offset, and kinked rules need
        them; other weights shift only far from the center, where the
        monomial basis stops converging.
        """
        f = self.field
        if j < f.n:
            radial = f.phi[j].is_zero or self.kinked
        else:
            radial = all(h.is_zero for h in f.gamma.fields)
        return 0.0 if radial else SHIFT_THRESHOLD

    def basis(self, permute_seed: int | None = None) -> BasisSpec:
        r = self.resolution
        fld = self.field
        factors = [FactorBasis.for_domain(d, r.degree_of(j), fld.z0[j], self.shift_threshold(j))
                   for j, d in enumerate(fld.domains)]
        factors += [FactorBasis.for_domain(u, r.fiber_degree, a, self.shift_threshold(fld.n + i))
                    for i, (u, a) in enumerate(zip(fld.fiber, fld.u0))]
        return BasisSpec.tensor(factors, permute_seed)


KINK_NODES = 1 << 23


def _e_minus(phi: HarmonicField, d: Domain):
    return None if phi.is_zero else (lambda z: np.exp(-phi.value(d, z)))


def _fiber_rules(spec: ProductSpaceSpec, offset: float, bump: int):
    nr, na = spec.resolution.fiber_nodes()
    out = []
    for i, (u, a) in enumerate(zip(spec.field.fiber, spec.field.u0)):
        thr = spec.shift_threshold(spec.n + i)
        fields = spec.field.gamma.fields
        phi = fields[i] if i < len(fields) else HarmonicField()
        ea, er = (0, 0) if thr == 0 else pullback_extra_nodes(u, a, _e_minus(phi, u), thr)
        out.append(moebius_rule(area_rule(u, nr + er + bump, na + ea, offset), u, a, thr))
    return out


def measure_terms(spec: ProductSpaceSpec, offset: float = 0.0, bump: int = 0) -> list[MeasureTerm]:
    """Product-quadrature terms realizing the selected measure.

    ``offset`` rotates every angular grid and ``bump`` adds radial nodes, so
    two calls with different arguments share no quadrature nodes.
    """
    fld, sel = spec.field, spec.selector
    res = spec.resolution
    n = fld.n
    sizes = [res.nodes(res.degree_of(j)) for j in range(n)]
    # disc rules follow the automorphism centering the basis at z0; weights
    # other than e^{-phi_j} are radial in its coordinate
    areas, bnds = [], []
    for j, (d, a, (nb, nr, na)) in enumerate(zip(fld.domains, fld.z0, sizes)):
        thr = spec.shift_threshold(j)
        ea, er = (0, 0) if thr == 0 else pullback_extra_nodes(d, a, _e_minus(fld.phi[j], d), thr)
        areas.append(moebius_rule(area_rule(d, nr + er + bump, na + ea, offset), d, a, thr))
        bnds.append(moebius_rule(boundary_rule(d, nb + ea, offset), d, a, thr))
    fib = _fiber_rules(spec, offset, bump)
    with_gamma = sel.endswith("_U")

    def wrap(base_weight):
        if not with_gamma:
            return lambda coords: base_weight(coords[:n])
        return lambda coords: base_weight(coords[:n]) * fld.gamma(fld.fiber, coords[n:])

    fgroup = ((tuple(range(n, n + fld.m)), lambda c: fld.gamma(fld.fiber, c)),) \
        if with_gamma else ()

    def e_phi(j):
        if fld.phi[j].is_zero:
            return None
        return lambda c: np.exp(-fld.phi[j].value(fld.domains[j], c[0]))

    def inv_dgdn(j, s=1.0):
        def w(c):
            out = s / boundary_normal_derivative(fld, j, c[0])
            if not fld.phi[j].is_zero:
                out = out * np.exp(-fld.phi[j].value(fld.domains[j], c[0]))
            return out
        return w

    if sel in ("dD", "dD_U"):
        return [MeasureTerm(tuple(bnds) + tuple(fib),
                            wrap(lambda c: lambda_single(fld, c[0])), 1.0 / TWO_PI,
                            (((0,), inv_dgdn(0, 1.0 / fld.p[0])),) + fgroup)]
    if sel in ("M", "M_U") and spec.kinked:
        extra = [pullback_extra_nodes(d, a, _e_minus(phi, d), 0.0)
                 for d, a, phi in zip(fld.domains, fld.z0, fld.phi)]
        nr = max(sz[1] for sz in sizes) + bump + max(e[1] for e in extra)
        na = max(sz[2] + e[0] for sz, e in zip(sizes, extra))
        # beyond the node budget fall back to the product rule below
        if n * (nr * na) ** n <= KINK_NODES:
            rules = kinked_polydisc_rules(fld.domains, fld.z0, fld.p, nr, na, offset)
            return [MeasureTerm(rules + tuple(fib), wrap(lambda c: rho_interior(fld, c)), 1.0,
                                joint=(tuple(range(n)),))]
    if sel in ("M", "M_U"):
        if fld.c.kind == "constant_one":
            groups = tuple(((j,), e_phi(j)) for j in range(n))
        else:
            groups = ((tuple(range(n)), lambda c: rho_interior(fld, c)),)
        return [MeasureTerm(tuple(areas) + tuple(fib), wrap(lambda c: rho_interior(fld, c)),
                            1.0, groups + fgroup)]
    if sel in ("S", "S_U"):
        groups = tuple(((j,), inv_dgdn(j)) for j in range(n))
        return [MeasureTerm(tuple(bnds) + tuple(fib),
                            wrap(lambda c: lambda_distinguished(fld, c)),
                            distinguished_normalization(n), groups + fgroup)]
    terms = []
    for j in range(n):
        rules = tuple(bnds[l] if l == j else areas[l] for l in range(n)) + tuple(fib)
        groups = tuple(((l,), inv_dgdn(l, 1.0 / fld.p[l]) if l == j else e_phi(l))
                       for l in range(n))
        terms.append(MeasureTerm(rules, wrap(lambda c, j=j: rho_boundary_face(fld, j, c)),
                                 1.0 / TWO_PI, groups + fgroup))
    return terms


def gram(spec: ProductSpaceSpec, direct: bool = False, seed: int = 0) -> GramMatrix:
    """Gram matrix of the full space.

    ``direct=True`` enumerates the basis in a seeded random order, uses
    rotated quadrature grids with an extra radial node and sums over every
    product node; otherwise separable weights are assembled factor by factor.
    """
    if direct:
        rng = np.random.default_rng(seed)
        basis = spec.basis(permute_seed=int(rng.integers(2**31)))
        terms = measure_terms(spec, offset=float(rng.uniform(0.2, 0.8)), bump=1)
    else:
        basis = spec.basis()
        terms = measure_terms(spec)
    return assemble_gram(basis, terms, spec.selector, separable=not direct)


def fiber_gram(spec: ProductSpaceSpec) -> GramMatrix:
    """Gram of the weighted Bergman space ``A^2(U, gamma)``."""
    fld = spec.field
    if not fld.fiber:
        raise ValueError("space has no fiber")
    basis = BasisSpec.tensor([FactorBasis.for_domain(u, spec.resolution.fiber_degree, a)
                              for u, a in zip(fld.fiber, fld.u0)])
    term = MeasureTerm(tuple(_fiber_rules(spec, 0.0, 0)),
                       lambda coords: fld.gamma(fld.fiber, coords))
    return assemble_gram(basis, [term], "fiber")


def space_onb(spec: ProductSpaceSpec) -> OrthonormalBasis:
    """Orthonormal basis of the space in natural order and default quadrature.

    Small problems go through the SVD of the weighted design matrix, which
    stays accurate for the badly conditioned Grams of thin annuli; large
    tensor problems use the separable Gram.
    """
    basis = spec.basis()
    terms = measure_terms(spec)
    rows = sum(t.size for t in terms)
    if rows * basis.dim <= DESIGN_ENTRIES:
        return orthonormalize_design(basis, terms, spec.selector)
    return orthonormalize(assemble_gram(basis, terms, spec.selector))


def direct_kernel(spec: ProductSpaceSpec, z, w, seed: int = 0) -> complex:
    """Kernel from the full tensor Gram, assembled without using any factorization."""
    return kernel_eval(orthonormalize(gram(spec, direct=True, seed=seed)), z, w)


def kernel(spec: ProductSpaceSpec, z, w) -> complex:
    """Kernel in natural basis order and default quadrature."""
    return kernel_eval(space_onb(spec), z, w)


def factored_kernel(spec: ProductSpaceSpec, z, w) -> complex:
    """Product of the base kernel and the fiber Bergman kernel."""
    if spec.selector not in FACTORED:
        raise NotImplementedError(f"selector {spec.selector} has no product decomposition")
    n = spec.n
    z, w = _as_tuple(z), _as_tuple(w)
    base = kernel_eval(orthonormalize(gram(spec.base())), z[:n], w[:n])
    fib = kernel_eval(orthonormalize(fiber_gram(spec)), z[n:], w[n:])
    return base * fib


def _as_tuple(p) -> tuple:
    return (p,) if np.isscalar(p) else tuple(p)


def extremal(spec: ProductSpaceSpec, jets: JetIdeal, direct: bool = False,
             seed: int = 0) -> ExtremalResult:
    """``K^{I,h0}`` (or ``B^{I,h0}``) of the space at its base point."""
    g = gram(spec, direct=True, seed=seed) if direct else space_onb(spec)
    return constrained_min_norm(g, jets, spec.base_point)


def factored_extremal(spec: ProductSpaceSpec, jets: JetIdeal) -> tuple[float, float, float]:
    """``(base value with I_1, fiber value with I_2, product)``."""
    if spec.selector not in FACTORED:
        raise NotImplementedError(f"selector {spec.selector} has no product decomposition")
    base = constrained_min_norm(gram(spec.base()), jets.base(), spec.field.z0).kernel_value
    fib = constrained_min_norm(fiber_gram(spec), jets.fiber(), spec.field.u0).kernel_value
    return base, fib, base * fib


# ---------------------------------------------------------------------------
# verification


@dataclass
class DecompositionReport:
    identity: str
    selector: str
    max_rel_err: float
    tol: float
    passed: bool
    samples: list = field(default_factory=list)
    infeasible: int = 0
    error: str | None = None

    def to_dict(self) -> dict:
        return {"id": self.identity, "selector": self.selector,
                "max_rel_err": self.max_rel_err, "tol": self.tol, "passed": self.passed,
                "infeasible": self.infeasible, "error": self.error,
                "samples": [{k: _jsonable(v) for k, v in s.items()} for s in self.samples]}


def _jsonable(v):
    if isinstance(v, complex):
        return [v.real, v.imag]
    if isinstance(v, tuple):
        return [_jsonable(x) for x in v]
    return v


def random_jets(rng: np.random.Generator, n: int, m: int, max_order: int = 1,
                fiber_order: int = 1) -> JetIdeal:
    """Random ``I'`` with ``beta~'' = ord b0`` and random Taylor data."""
    l_coeffs, bt = [], []
    for _ in range(n):
        b = int(rng.integers(0, max_order + 1))
        bt.append(int(rng.integers(b, max_order + 1)))
        coeffs = [0.0] * b + list(rng.normal(size=bt[-1] - b + 1)
                                 + 1j * rng.normal(size=bt[-1] - b + 1))
        if coeffs[b] == 0:
            coeffs[b] = 1.0
        l_coeffs.append(tuple(coeffs))
    b_coeffs = {}
    if m:
        idx = multi_indices(m, fiber_order)
        lead = idx[int(rng.integers(len(idx)))]
        for t in idx:
            b_coeffs[t] = complex(rng.normal(), rng.normal())
        for t in idx:
            if (sum(t), t) < (sum(lead), lead):
                b_coeffs[t] = 0.0
    return JetIdeal.total(tuple(l_coeffs), tuple(bt), b_coeffs, m)


def verify_decomposition(identity: str, spec: ProductSpaceSpec, n_samples: int = 5,
                         seed: int = 0, tol: float = 1e-6, jets: JetIdeal | None = None,
                         margin: float = 0.2) -> DecompositionReport:
    """Compare the direct and factored sides of a decomposition identity.

    Kernel identities are sampled at ``n_samples`` random point pairs.  Jet
    identities are sampled over random fiber base points ``u0`` and random
    Taylor data (or the fixed ``jets``).  An infeasible constraint set gives
    ``0`` on both sides and counts as agreement.
    """
    if identity not in IDENTITIES:
        raise ValueError(f"unknown identity {identity!r}; expected one of {list(IDENTITIES)}")
    selector, is_jet = IDENTITIES[identity]
    if spec.selector != selector:
        spec = ProductSpaceSpec(spec.field, selector, spec.resolution)
    rng = np.random.default_rng(seed)
    fld = spec.field
    report = DecompositionReport(identity, selector, 0.0, tol, True)
    # neither side's Gram depends on the sample points, only the functionals do
    direct_onb = orthonormalize(gram(spec, direct=True, seed=seed))
    base_onb = orthonormalize(gram(spec.base()))
    fiber_onb = orthonormalize(fiber_gram(spec))
    n = fld.n
    for k in range(n_samples):
        if is_jet:
            u0 = tuple(complex(sample_interior(u, rng, 1, margin)[0]) for u in fld.fiber)
            ideal = jets or random_jets(rng, fld.n, fld.m)
            d = constrained_min_norm(direct_onb, ideal, fld.z0 + u0)
            f = (constrained_min_norm(base_onb, ideal.base(), fld.z0).kernel_value
                 * constrained_min_norm(fiber_onb, ideal.fiber(), u0).kernel_value)
            d_val = d.kernel_value
            if not d.feasible:
                report.infeasible += 1
            sample = {"u0": u0, "direct": d_val, "factored": f}
        else:
            z = _sample_point(spec, rng, margin)
            w = _sample_point(spec, rng, margin)
            d_val = kernel_eval(direct_onb, z, w)
            f = kernel_eval(base_onb, z[:n], w[:n]) * kernel_eval(fiber_onb, z[n:], w[n:])
            sample = {"z": z, "w": w, "direct": complex(d_val), "factored": complex(f)}
        if d_val == 0 and f == 0:
            err = 0.0
        else:
            err = abs(d_val - f) / max(abs(d_val), abs(f))
        sample["rel_err"] = float(err)
        report.samples.append(sample)
        report.max_rel_err = max(report.max_rel_err, float(err))
    report.passed = report.max_rel_err <= tol
    return report


def verification_field(identity: str, n: int = 2, seed: int = 0,
                       first: Domain | None = None) -> WeightField:
    """Random admissible catalog weights for checking ``identity``.

    Base factors are unit discs (the first may be replaced by ``first``),
    ``phi_j = Re(a_j (z - c_j))`` and ``gamma(u) = exp(-Re(b u))`` with
    seeded coefficients of modulus at most 1/2; the fiber is one disc.
    """
    if identity not in IDENTITIES:
        raise ValueError(f"unknown identity {identity!r}")
    rng = np.random.default_rng(seed)
    coef = lambda: complex(*rng.uniform(-0.35, 0.35, 2))
    if identity == "3:E4":
        n = 1
    domains = [first or Disc()] + [Disc() for _ in range(n - 1)]
    z0 = []
    for d in domains:
        if isinstance(d, Annulus):
            z0.append(d.center + math.sqrt(d.r_inner * d.r_outer) * np.exp(1j * rng.uniform(0, TWO_PI)))
        else:
            z0.append(d.center + 0.3 * d.radius * complex(*rng.uniform(-1, 1, 2)) / math.sqrt(2))
    phi = [HarmonicField((0j, coef()), center=d.center) for d in domains]
    fiber = (Disc(),)
    gamma = GammaWeight((HarmonicField((0j, coef())),))
    u0 = (0.2 * complex(*rng.uniform(-1, 1, 2)),)
    if identity == "3:E4":
        return single_domain_field(domains[0], z0[0], 1.0, phi[0], None, fiber, u0, gamma)
    p = tuple(float(n) for _ in range(n)) if identity in ("3:E8", "Pro-28", "key-decomp1") \
        else tuple(2.0 * n for _ in range(n))
    return product_field(domains, z0, p, phi, None, fiber, u0, gamma)


def verification_resolution(n: int) -> Resolution:
    if n <= 1:
        return Resolution(6, 2)
    if n == 2:
        return Resolution(4, 2, 24, 7, 14)
    return Resolution(2, 1, 16, 5, 8)


def _sample_point(spec: ProductSpaceSpec, rng, margin: float) -> tuple[complex, ...]:
    doms = spec.field.domains + spec.field.fiber
    return tuple(complex(sample_interior(d, rng, 1, margin)[0]) for d in doms)


def boundary_mass(spec: ProductSpaceSpec) -> float:
    """``int 1 dmu`` of the selected measure with the weight replaced by one."""
    terms = measure_terms(spec)
    total = 0.0
    for t in terms:
        total += t.scale * math.prod(float(np.sum(r.weights)) for r in t.rules)
    return total
