"""Finite truncations of weighted holomorphic function spaces.

A :class:`BasisSpec` is a product of per-factor monomial (disc) or Laurent
(annulus) systems.  Gram matrices are assembled from lists of
:class:`MeasureTerm`; each term is a product quadrature with a pointwise
weight.  Inner products use ``G[a, b] = int conj(phi_a) phi_b dmu`` so that
``||f||^2 = c^H G c`` for ``f = sum_a c_a phi_a``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .geometry import SHIFT_THRESHOLD, Annulus, Disc, Domain, automorphism_shift

CHUNK = 1 << 14
# largest nodes * dim for which the weighted design matrix is formed explicitly
DESIGN_ENTRIES = 1 << 23


class GramAssemblyError(ArithmeticError):
    pass


# ---------------------------------------------------------------------------
# bases


def _falling(k: int, j: int) -> float:
    out = 1.0
    for i in range(j):
        out *= k - i
    return out


@dataclass(frozen=True, eq=False)
class FactorBasis:
    """Scaled powers ``s_k (z - c)^k`` on one factor domain.

    Scales normalize each power to unit maximum modulus on the closed domain,
    which keeps Laurent Grams on annuli within a modest condition number.
    On a disc with a base point ``a`` far off the center (see
    ``automorphism_shift``) the basis is
    ``phi^k / (1 - conj(b) u)^2`` with the automorphism
    ``phi = (u - b) / (1 - conj(b) u)``, ``u = (z - c)/R``, ``b = (a - c)/R``.
    The extra factor cancels the Jacobian of the automorphism that every
    measure on the disc carries, so pulled-back Gram integrands are
    polynomial again; at the center this is the monomial basis.
    """

    domain: Domain
    exponents: tuple[int, ...]
    center: complex
    scales: np.ndarray
    shift: complex = 0j

    @classmethod
    def for_domain(cls, domain: Domain, degree: int, point: complex | None = None,
                   threshold: float = SHIFT_THRESHOLD) -> "FactorBasis":
        if degree < 0:
            raise ValueError("basis degree must be non-negative")
        if isinstance(domain, Annulus):
            exps = tuple(range(-degree, degree + 1))
        else:
            exps = tuple(range(degree + 1))
        fb = cls.with_exponents(domain, exps)
        b = automorphism_shift(domain, point, threshold)
        if b != 0:
            fb = cls(domain, exps, domain.center, np.full(len(exps), (1 - abs(b)) ** 2), b)
        return fb

    @classmethod
    def with_exponents(cls, domain: Domain, exponents: Sequence[int]) -> "FactorBasis":
        exps = tuple(int(k) for k in exponents)
        if not exps:
            raise ValueError("empty exponent range")
        if isinstance(domain, Disc) and min(exps) < 0:
            raise ValueError("negative powers are not holomorphic on a disc")
        scales = np.array([1.0 / (domain.outer_radius if k >= 0 else domain.inner_radius) ** k
                           for k in exps])
        return cls(domain, exps, domain.center, scales)

    @property
    def size(self) -> int:
        return len(self.exponents)

    def coordinate(self, z) -> np.ndarray:
        w = np.asarray(z, dtype=complex) - self.center
        if self.shift == 0:
            return w
        u = w / self.domain.radius
        return (u - self.shift) / (1 - np.conj(self.shift) * u)

    def evaluate(self, z) -> np.ndarray:
        """Matrix ``(len(z), size)`` of basis values."""
        z = np.asarray(z, dtype=complex).ravel()
        w = self.coordinate(z)
        k = np.array(self.exponents)
        out = self.scales * w[:, None] ** k[None, :]
        if self.shift != 0:
            u = (z - self.center) / self.domain.radius
            out = out / ((1 - np.conj(self.shift) * u) ** 2)[:, None]
        return out

    def taylor(self, z0: complex, order: int) -> np.ndarray:
        """Taylor coefficient of ``(z - z0)^order`` for each basis function."""
        if self.shift != 0:
            return self._moebius_taylor(complex(z0), order)
        w0 = complex(z0) - self.center
        out = np.empty(self.size, dtype=complex)
        fact = math.factorial(order)
        for i, k in enumerate(self.exponents):
            coef = _falling(k, order) / fact
            out[i] = 0.0 if coef == 0 else self.scales[i] * coef * w0 ** (k - order)
        return out

    def _moebius_taylor(self, z0: complex, order: int) -> np.ndarray:
        # phi(z0 + R t) = ((u0 - b) + t) / (A - conj(b) t) with A = 1 - conj(b) u0
        b, r = self.shift, self.domain.radius
        u0 = (z0 - self.center) / r
        a = 1 - np.conj(b) * u0
        q = np.conj(b) / a
        j = np.arange(order + 1)
        series = (u0 - b) * q ** j / a
        series[1:] += q ** (j[1:] - 1) / a
        # (1 - conj(b) u)^-2 = A^-2 sum (j + 1) q^j t^j
        power = (j + 1) * q ** j / a ** 2
        out = np.empty(self.size, dtype=complex)
        k_max = max(self.exponents)
        by_k = {}
        for k in range(k_max + 1):
            by_k[k] = power[order]
            power = np.convolve(power, series)[:order + 1]
        for i, k in enumerate(self.exponents):
            out[i] = self.scales[i] * by_k[k] / r ** order
        return out

    @property
    def max_order(self) -> int:
        return self.size - 1


@dataclass(frozen=True, eq=False)
class BasisSpec:
    """Products ``prod_f phi_{f, a_f}``; ``indices[a]`` lists the factor positions."""

    factors: tuple[FactorBasis, ...]
    indices: np.ndarray

    @classmethod
    def tensor(cls, factors: Sequence[FactorBasis], permute_seed: int | None = None) -> "BasisSpec":
        grids = np.meshgrid(*[np.arange(f.size) for f in factors], indexing="ij")
        idx = np.stack([g.ravel() for g in grids], axis=1)
        if permute_seed is not None:
            idx = idx[np.random.default_rng(permute_seed).permutation(len(idx))]
        return cls(tuple(factors), idx)

    @classmethod
    def for_domains(cls, domains: Sequence[Domain], degrees: Sequence[int],
                    permute_seed: int | None = None) -> "BasisSpec":
        return cls.tensor([FactorBasis.for_domain(d, n) for d, n in zip(domains, degrees)],
                          permute_seed)

    @property
    def dim(self) -> int:
        return len(self.indices)

    @property
    def n_factors(self) -> int:
        return len(self.factors)

    def exponents(self) -> np.ndarray:
        return np.stack([np.array(f.exponents)[self.indices[:, i]]
                         for i, f in enumerate(self.factors)], axis=1)

    def evaluate(self, coords) -> np.ndarray:
        """Values at product points; ``coords`` holds one array per factor."""
        coords = [np.atleast_1d(np.asarray(c, dtype=complex)) for c in coords]
        out = None
        for i, (f, c) in enumerate(zip(self.factors, coords)):
            e = f.evaluate(c)[:, self.indices[:, i]]
            out = e if out is None else out * e
        return out

    def evaluate_point(self, point) -> np.ndarray:
        return self.evaluate([[p] for p in point])[0]


def _point_tuple(point, n: int) -> tuple[complex, ...]:
    if np.isscalar(point):
        point = (point,)
    point = tuple(complex(p) for p in point)
    if len(point) != n:
        raise ValueError(f"point has {len(point)} coordinates, basis has {n} factors")
    return point


# ---------------------------------------------------------------------------
# measures and Gram matrices


@dataclass(frozen=True, eq=False)
class MeasureTerm:
    """One product measure ``scale * weight(w) * prod_f d(rule_f)``.

    ``groups`` optionally records that the weight factorizes as
    ``prod_g weight_g(w_{F_g})`` over disjoint groups ``F_g`` of factors;
    each entry is ``(factor indices, weight_g or None)``.  Factors listed
    together in ``joint`` carry aligned rules of equal length whose nodes are
    zipped instead of multiplied out (a non-product rule on their product).
    """

    rules: tuple
    weight: Callable | None = None
    scale: float = 1.0
    groups: tuple | None = None
    joint: tuple = ()

    def axes(self) -> list[tuple[int, ...]]:
        zipped = {k for group in self.joint for k in group}
        return [tuple(g) for g in self.joint] + \
            [(k,) for k in range(len(self.rules)) if k not in zipped]

    @property
    def size(self) -> int:
        return int(np.prod([self.rules[a[0]].size for a in self.axes()]))

    def indices(self, flat: np.ndarray) -> list[np.ndarray]:
        """Per-factor node indices of flattened product nodes."""
        axes = self.axes()
        ax_idx = np.unravel_index(flat, [self.rules[a[0]].size for a in axes])
        out = [None] * len(self.rules)
        for a, i in zip(axes, ax_idx):
            for k in a:
                out[k] = i
        return out


@dataclass(frozen=True, eq=False)
class GramMatrix:
    basis: BasisSpec
    measure: str
    entries: np.ndarray

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


class _LazyEval:
    """Basis values at ``rule.nodes[i]`` computed per chunk, for long zipped rules."""

    def __init__(self, factor: FactorBasis, rule):
        self.factor, self.rule = factor, rule

    def __getitem__(self, i):
        return self.factor.evaluate(self.rule.nodes[i])


def _factor_values(basis: BasisSpec, term: MeasureTerm) -> list:
    zipped = {k for group in term.joint for k in group}
    return [_LazyEval(f, r) if k in zipped else f.evaluate(r.nodes)
            for k, (f, r) in enumerate(zip(basis.factors, term.rules))]


def _node_sum(evals, cols, term: MeasureTerm, weight, chunk: int) -> np.ndarray:
    """``sum_nodes w conj(V) V^T`` over every node of ``term``."""
    rules = term.rules
    total = term.size
    G = np.zeros((cols.shape[0], cols.shape[0]), dtype=complex)
    for start in range(0, total, chunk):
        flat = np.arange(start, min(start + chunk, total))
        idx = term.indices(flat)
        w = np.prod([r.weights[i] for r, i in zip(rules, idx)], axis=0)
        if weight is not None:
            w = w * weight([r.nodes[i] for r, i in zip(rules, idx)])
        V = None
        for k, (e, i) in enumerate(zip(evals, idx)):
            part = e[i][:, cols[:, k]]
            V = part if V is None else V * part
        G += (V.conj().T * w) @ V
    return G


def assemble_gram(basis: BasisSpec, terms: Sequence[MeasureTerm], measure: str = "",
                  chunk: int = CHUNK, separable: bool = True) -> GramMatrix:
    """Gram matrix under the sum of product measures in ``terms``.

    With ``separable=False`` (or terms without ``groups``) nodes of each term
    are visited in flattened chunks and every basis function is evaluated as
    a product at each product node, so the assembly makes no use of the
    tensor structure of basis, weight or rule.  Otherwise each weight group
    gets its own Gram on its own factors and the term is their entrywise
    product, which is the same quadrature sum reordered.
    """
    G = np.zeros((basis.dim, basis.dim), dtype=complex)
    for term in terms:
        if len(term.rules) != basis.n_factors:
            raise ValueError("measure term and basis have different factor counts")
        evals = _factor_values(basis, term)
        if not separable or term.groups is None or term.joint:
            G += term.scale * _node_sum(evals, basis.indices, term, term.weight, chunk)
            continue
        part = np.full((basis.dim, basis.dim), term.scale, dtype=complex)
        for factors, weight in term.groups:
            factors = list(factors)
            sizes = [basis.factors[k].size for k in factors]
            grids = np.meshgrid(*[np.arange(s) for s in sizes], indexing="ij")
            cols = np.stack([g.ravel() for g in grids], axis=1)
            sub = _node_sum([evals[k] for k in factors], cols,
                            MeasureTerm(tuple(term.rules[k] for k in factors)), weight, chunk)
            flat = np.ravel_multi_index(tuple(basis.indices[:, factors].T), sizes)
            part *= sub[np.ix_(flat, flat)]
        G += part
    if not np.all(np.isfinite(G)):
        raise GramAssemblyError(f"non-finite Gram entry for measure {measure!r}: "
                                "weight and quadrature rule do not match")
    G = 0.5 * (G + G.conj().T)
    return GramMatrix(basis, measure, G)


@dataclass(frozen=True, eq=False)
class OrthonormalBasis:
    """Columns of ``coeffs`` are raw-basis coefficients of orthonormal ``e_m``."""

    coeffs: np.ndarray
    gram: GramMatrix
    eigenvalues: np.ndarray
    dropped: int = 0
    labels: tuple = ()

    @property
    def basis(self) -> BasisSpec:
        return self.gram.basis

    @property
    def rank(self) -> int:
        return self.coeffs.shape[1]

    def evaluate(self, coords) -> np.ndarray:
        return self.basis.evaluate(coords) @ self.coeffs


def orthonormalize(gram: GramMatrix, rel_tol: float = 1e-12) -> OrthonormalBasis:
    """Eigen-decomposition based orthonormalization.

    Directions with eigenvalue below ``rel_tol * trace`` are dropped and
    counted in ``dropped``.
    """
    G = gram.entries
    tr = float(np.real(np.trace(G)))
    if not tr > 0:
        raise np.linalg.LinAlgError("zero Gram matrix")
    lam, U = np.linalg.eigh(G)
    keep = lam > rel_tol * tr
    lam, U = lam[keep], U[:, keep]
    return OrthonormalBasis(U / np.sqrt(lam), gram, lam, int(np.sum(~keep)))


def design_matrix(basis: BasisSpec, terms: Sequence[MeasureTerm]) -> np.ndarray:
    """Rows ``sqrt(scale * w * weight) * phi(node)`` over every node of every term.

    ``A^H A`` is the Gram matrix, but ``A`` carries only the square root of
    its condition number.
    """
    blocks = []
    for term in terms:
        evals = _factor_values(basis, term)
        idx = term.indices(np.arange(term.size))
        w = term.scale * np.prod([r.weights[i] for r, i in zip(term.rules, idx)], axis=0)
        if term.weight is not None:
            w = w * term.weight([r.nodes[i] for r, i in zip(term.rules, idx)])
        w = np.real_if_close(np.asarray(w))
        if np.iscomplexobj(w) or np.any(w < 0) or not np.all(np.isfinite(w)):
            raise GramAssemblyError("design matrix needs finite non-negative weights")
        V = np.sqrt(w)[:, None]
        for k, (e, i) in enumerate(zip(evals, idx)):
            V = V * e[i][:, basis.indices[:, k]]
        blocks.append(V)
    return np.vstack(blocks)


def orthonormalize_design(basis: BasisSpec, terms: Sequence[MeasureTerm], measure: str = "",
                          rel_tol: float = 1e-14) -> OrthonormalBasis:
    """Orthonormalization through the SVD of :func:`design_matrix`.

    Singular values below ``rel_tol`` times the largest are dropped, which
    resolves Gram condition numbers up to about ``rel_tol**-2``.
    """
    A = design_matrix(basis, terms)
    _, sv, Vh = np.linalg.svd(A, full_matrices=False)
    if not sv.size or not sv[0] > 0:
        raise np.linalg.LinAlgError("zero design matrix")
    keep = sv > rel_tol * sv[0]
    G = A.conj().T @ A
    gram = GramMatrix(basis, measure, 0.5 * (G + G.conj().T))
    return OrthonormalBasis(Vh[keep].conj().T / sv[keep], gram, sv[keep] ** 2,
                            int(np.sum(~keep)))


def kernel_eval(onb: OrthonormalBasis, z, w) -> complex:
    """``sum_m e_m(z) conj(e_m(w))`` over the truncation."""
    n = onb.basis.n_factors
    ez = onb.evaluate([[p] for p in _point_tuple(z, n)])[0]
    ew = onb.evaluate([[p] for p in _point_tuple(w, n)])[0]
    return complex(ez @ ew.conj())


def kernel_diag(onb: OrthonormalBasis, z) -> float:
    return kernel_eval(onb, z, z).real


# ---------------------------------------------------------------------------
# jets


def graded_lex_key(alpha: Sequence[int]) -> tuple:
    """Sort key for the multi-index order: total degree first, then the
    first differing coordinate."""
    return (sum(alpha), tuple(alpha))


def multi_indices(dim: int, max_grade: int) -> list[tuple[int, ...]]:
    """All multi-indices of length ``dim`` with ``|alpha| <= max_grade``, sorted."""
    out = []

    def rec(prefix, left, k):
        if k == 0:
            out.append(tuple(prefix))
            return
        for a in range(left + 1):
            rec(prefix + [a], left - a, k - 1)

    rec([], max_grade, dim)
    return sorted(out, key=graded_lex_key)


def order_of(coeffs: dict[tuple[int, ...], complex], tol: float = 0.0) -> tuple[int, ...]:
    nonzero = [a for a, v in coeffs.items() if abs(v) > tol]
    if not nonzero:
        raise ValueError("the zero germ has no order")
    return min(nonzero, key=graded_lex_key)


def jet_matrix(basis: BasisSpec, point, indices: Sequence[Sequence[int]],
               derivative: bool = False) -> np.ndarray:
    """Linear map from raw coefficients to Taylor coefficients (or derivatives) at ``point``.

    Row ``r`` gives the coefficient of ``(w - point)^indices[r]``; with
    ``derivative=True`` it gives ``f^{(alpha)}(point) = alpha! * coefficient``.
    All entries are exact formulas for differentiated powers.
    """
    point = _point_tuple(point, basis.n_factors)
    cache: dict = {}
    rows = []
    for alpha in indices:
        if len(alpha) != basis.n_factors:
            raise ValueError(f"multi-index {alpha} has the wrong length")
        row = np.ones(basis.dim, dtype=complex)
        for k, (f, a) in enumerate(zip(basis.factors, alpha)):
            key = (k, a)
            if key not in cache:
                cache[key] = f.taylor(point[k], a)
            row = row * cache[key][basis.indices[:, k]]
            if derivative:
                row = row * math.factorial(a)
        rows.append(row)
    return np.array(rows).reshape(len(rows), basis.dim)


@dataclass(frozen=True)
class JetIdeal:
    """Ideal of germs whose Taylor coefficients vanish on an index set ``L``.

    The base part is the box ``alpha_j <= beta_tilde_j``; the fiber part is
    ``{tau <= fiber_box}`` in the multi-index order.  Targets are the Taylor
    coefficients of ``h0 = prod_j l_j * b0``.
    """

    l_coeffs: tuple[tuple[complex, ...], ...] = ()
    beta_tilde: tuple[int, ...] = ()
    b_coeffs: tuple[tuple[tuple[int, ...], complex], ...] = ()
    fiber_dim: int = 0
    fiber_bound: tuple[int, ...] = ()
    fiber_box: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "l_coeffs", tuple(tuple(complex(c) for c in l)
                                                   for l in self.l_coeffs))
        object.__setattr__(self, "beta_tilde", tuple(int(b) for b in self.beta_tilde))
        object.__setattr__(self, "b_coeffs", tuple((tuple(int(x) for x in a), complex(v))
                                                   for a, v in self.b_coeffs))
        if len(self.l_coeffs) != len(self.beta_tilde):
            raise ValueError("one Taylor polynomial l_j per bound beta_tilde_j")
        for bt, b in zip(self.beta_tilde, self.beta):
            if bt < b:
                raise ValueError(f"beta_tilde {self.beta_tilde} below observed orders {self.beta}")
        if self.fiber_dim:
            if any(len(a) != self.fiber_dim for a, _ in self.b_coeffs):
                raise ValueError("fiber multi-indices have the wrong length")
            if not self.fiber_bound:
                object.__setattr__(self, "fiber_bound", self.beta_fiber)
            if not self.fiber_box:
                object.__setattr__(self, "fiber_box", self.beta_fiber)
            if graded_lex_key(self.fiber_bound) < graded_lex_key(self.beta_fiber):
                raise ValueError("fiber bound below the order of b0")

    @classmethod
    def total(cls, l_coeffs, beta_tilde, b_coeffs=(), fiber_dim: int = 0,
              fiber_bound=()) -> "JetIdeal":
        """The ideal ``I'`` on ``M x U``: fiber coefficients pinned up to ``ord b0``."""
        if isinstance(b_coeffs, dict):
            b_coeffs = tuple(b_coeffs.items())
        ideal = cls(tuple(l_coeffs), tuple(beta_tilde), tuple(b_coeffs), fiber_dim,
                    tuple(fiber_bound))
        if fiber_dim:
            ideal = cls(ideal.l_coeffs, ideal.beta_tilde, ideal.b_coeffs, fiber_dim,
                        ideal.fiber_bound, ideal.beta_fiber)
        return ideal

    @classmethod
    def maximal(cls, n: int, fiber_dim: int = 0) -> "JetIdeal":
        """Maximal ideal with ``h0 = 1``."""
        b = (((0,) * fiber_dim, 1.0),) if fiber_dim else ()
        return cls.total(((1.0,),) * n, (0,) * n, b, fiber_dim)

    @property
    def beta(self) -> tuple[int, ...]:
        out = []
        for l in self.l_coeffs:
            nz = [i for i, c in enumerate(l) if c != 0]
            if not nz:
                raise ValueError("l_j must not vanish identically")
            out.append(nz[0])
        return tuple(out)

    @property
    def beta_fiber(self) -> tuple[int, ...]:
        return order_of(dict(self.b_coeffs)) if self.fiber_dim else ()

    @property
    def n_base(self) -> int:
        return len(self.beta_tilde)

    def base(self) -> "JetIdeal":
        """``I_1`` on ``M``."""
        return JetIdeal(self.l_coeffs, self.beta_tilde)

    def fiber(self) -> "JetIdeal":
        """``I_2`` on ``U``: fiber coefficients pinned up to ``beta_tilde''``."""
        return JetIdeal((), (), self.b_coeffs, self.fiber_dim, self.fiber_bound,
                        self.fiber_bound)

    def index_set(self) -> list[tuple[int, ...]]:
        base = multi_indices(self.n_base, sum(self.beta_tilde)) if self.n_base else [()]
        base = [a for a in base if all(x <= b for x, b in zip(a, self.beta_tilde))]
        if not self.fiber_dim:
            return base
        key = graded_lex_key(self.fiber_box)
        fib = [t for t in multi_indices(self.fiber_dim, sum(self.fiber_box))
               if graded_lex_key(t) <= key]
        return [a + t for a in base for t in fib]

    def target(self) -> np.ndarray:
        b = dict(self.b_coeffs)
        out = []
        for alpha in self.index_set():
            v = 1.0 + 0j
            for j, l in enumerate(self.l_coeffs):
                v *= l[alpha[j]] if alpha[j] < len(l) else 0.0
            if self.fiber_dim:
                v *= b.get(alpha[self.n_base:], 0.0)
            out.append(v)
        return np.array(out, dtype=complex)

    def constraints(self, basis: BasisSpec, point) -> tuple[np.ndarray, np.ndarray]:
        idx = self.index_set()
        if idx and len(idx[0]) != basis.n_factors:
            raise ValueError("jet ideal and basis have different numbers of coordinates")
        return jet_matrix(basis, point, idx), self.target()


@dataclass(frozen=True, eq=False)
class ExtremalResult:
    coeffs: np.ndarray | None
    min_norm_sq: float
    kernel_value: float
    feasible: bool
    residual: float = 0.0


def constrained_min_norm(gram: GramMatrix | OrthonormalBasis, jets: JetIdeal | None = None,
                         point=None, jet_maps: tuple[np.ndarray, np.ndarray] | None = None,
                         feas_tol: float = 1e-8) -> ExtremalResult:
    """Minimize ``c^H G c`` subject to ``T c = t``.

    The linear constraints come either from ``jets`` at ``point`` or are given
    directly as ``jet_maps = (T, t)``.  Infeasible sets give
    ``kernel_value = 0`` (infimum over the empty set is ``+inf``).
    """
    onb = gram if isinstance(gram, OrthonormalBasis) else orthonormalize(gram)
    if jet_maps is None:
        if jets is None or point is None:
            raise ValueError("pass either jets and point or explicit jet_maps")
        T, t = jets.constraints(onb.basis, point)
    else:
        T, t = jet_maps
    A = np.asarray(T) @ onb.coeffs
    t = np.asarray(t, dtype=complex)
    y, *_ = np.linalg.lstsq(A, t, rcond=None)
    scale = max(np.linalg.norm(t), np.finfo(float).tiny)
    residual = float(np.linalg.norm(A @ y - t) / scale)
    if residual > feas_tol or not np.any(t):
        return ExtremalResult(None, math.inf, 0.0, False, residual)
    norm_sq = float(np.vdot(y, y).real)
    return ExtremalResult(onb.coeffs @ y, norm_sq, 1.0 / norm_sq, True, residual)


def order_sorted_onb(gram: GramMatrix, point, max_grade: int | None = None,
                     feas_tol: float = 1e-8) -> OrthonormalBasis:
    """Orthonormal basis ``{f_alpha}`` with ``ord_point f_alpha = alpha``.

    For each multi-index ``alpha`` (in the multi-index order) the minimizer of
    ``||f||`` subject to ``f^{(alpha)} = 1`` and ``f^{(beta)} = 0`` for all
    ``beta < alpha`` is normalized; orders with no such ``f`` are skipped.
    ``labels`` holds the orders.
    """
    onb = orthonormalize(gram)
    basis = gram.basis
    if max_grade is None:
        max_grade = sum(f.max_order for f in basis.factors)
    alphas = multi_indices(basis.n_factors, max_grade)
    # Taylor coefficients rather than derivatives keep the rows of comparable
    # size; the normalization below removes the alpha! factors anyway
    D = jet_matrix(basis, point, alphas) @ onb.coeffs
    cols, labels = [], []
    for i, alpha in enumerate(alphas):
        if len(cols) == onb.rank:
            break
        A = D[: i + 1]
        t = np.zeros(i + 1, dtype=complex)
        t[i] = 1.0
        y, *_ = np.linalg.lstsq(A, t, rcond=None)
        if np.linalg.norm(A @ y - t) > feas_tol:
            continue
        cols.append(y / np.linalg.norm(y))
        labels.append(alpha)
    coeffs = onb.coeffs @ np.array(cols).T if cols else onb.coeffs[:, :0]
    return OrthonormalBasis(coeffs, gram, onb.eigenvalues, onb.dropped, tuple(labels))
