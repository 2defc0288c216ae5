import math

import numpy as np
import pytest

from saitohlab.geometry import Annulus, Disc, HarmonicField
from saitohlab.kernels import JetIdeal
from saitohlab.products import (IDENTITIES, ProductSpaceSpec, Resolution, boundary_mass,
                                direct_kernel, extremal, factored_extremal, factored_kernel,
                                kernel, random_jets, verification_field,
                                verification_resolution, verify_decomposition)
from saitohlab.weights import CFunction, GammaWeight, product_field, single_domain_field

BIDISC = product_field([Disc(), Disc()], [0j, 0j], (2.0, 2.0))


def spec_for(fld, sel, res=Resolution(6, 2)):
    return ProductSpaceSpec(fld, sel, res)


def test_selector_validation():
    with pytest.raises(ValueError):
        ProductSpaceSpec(BIDISC, "dD")
    with pytest.raises(ValueError):
        ProductSpaceSpec(BIDISC, "M_U")
    with pytest.raises(ValueError):
        ProductSpaceSpec(single_domain_field(Disc(), 0j), "S")
    with pytest.raises(ValueError):
        ProductSpaceSpec(BIDISC, "nowhere")
    assert ProductSpaceSpec(BIDISC, "∂M").selector == "dM"


def test_base_drops_fiber():
    fld = BIDISC.with_(fiber=(Disc(),), u0=(0.1,))
    spec = ProductSpaceSpec(fld, "S_U")
    base = spec.base()
    assert base.selector == "S" and base.field.m == 0
    assert spec.base_point == (0j, 0j, 0.1 + 0j)


@pytest.mark.parametrize("sel,mass", [
    ("M", math.pi ** 2 * 4.0),
    ("S", 2.0),
    ("dM", (2 * math.pi * 2.0 * math.pi + 2 * math.pi * math.pi * 4.0) / (2 * math.pi)),
])
def test_measure_masses(sel, mass):
    fld = product_field([Disc(0j, 2.0), Disc(1j, 1.0)], [0j, 1j], (2.0, 2.0))
    assert boundary_mass(spec_for(fld, sel)) == pytest.approx(mass, rel=1e-12)


def test_bidisc_kernels_at_origin():
    assert kernel(spec_for(BIDISC, "dM"), (0, 0), (0, 0)).real == pytest.approx(1 / math.pi)
    assert kernel(spec_for(BIDISC, "M"), (0, 0), (0, 0)).real == pytest.approx(1 / math.pi ** 2)
    assert kernel(spec_for(BIDISC, "S"), (0, 0), (0, 0)).real == pytest.approx(1.0)


def test_bidisc_distinguished_kernel_is_product_szego():
    spec = spec_for(BIDISC, "S", Resolution(30, 0))
    z, w = (0.3, -0.2j), (0.1j, 0.4)
    ref = 1 / ((1 - z[0] * np.conj(w[0])) * (1 - z[1] * np.conj(w[1])))
    assert abs(kernel(spec, z, w) - ref) < 1e-8


def test_direct_assembly_matches_default():
    phi = [HarmonicField((0j, 0.3)), HarmonicField((0j, -0.2j))]
    fld = product_field([Disc(), Disc()], [0.1, -0.2], (3.0, 3.0), phi)
    z = (0.2 + 0.1j, -0.3j)
    for sel in ("M", "dM", "S"):
        spec = spec_for(fld, sel, Resolution(4, 0, 64, 24, 48))
        a, b = kernel(spec, z, z), direct_kernel(spec, z, z, seed=3)
        assert abs(a - b) < 1e-10 * abs(a)
    # with c != 1 psi = max of the factors has a kink and area quadrature is slow
    spec = spec_for(fld.with_(c=CFunction("exp_decay", 0.4)), "M", Resolution(4, 0, 64, 24, 48))
    a, b = kernel(spec, z, z), direct_kernel(spec, z, z, seed=3)
    assert abs(a - b) < 1e-4 * abs(a)


def test_factored_kernel_needs_product_structure():
    with pytest.raises(NotImplementedError):
        factored_kernel(ProductSpaceSpec(BIDISC, "dM"), (0, 0), (0, 0))


def test_random_jets_pin_fiber_order():
    rng = np.random.default_rng(0)
    for _ in range(20):
        ideal = random_jets(rng, 2, 1)
        assert ideal.fiber_box == ideal.beta_fiber
        assert all(b <= bt for b, bt in zip(ideal.beta, ideal.beta_tilde))


def test_verification_field_shapes():
    f = verification_field("3:E4", 3, seed=1)
    assert f.kind == "single" and f.m == 1
    f = verification_field("eq-1", 2, seed=1, first=Annulus(0j, 0.5, 1.0))
    assert f.p == (4.0, 4.0) and isinstance(f.domains[0], Annulus)
    assert verification_field("3:E8", 2, seed=5) == verification_field("3:E8", 2, seed=5)
    with pytest.raises(ValueError):
        verification_field("nope")


@pytest.mark.parametrize("identity", ["3:E4", "key-decomp1", "S-decomp", "Pro-28", "eq-1"])
def test_fast_identities(identity):
    fld = verification_field(identity, 2, seed=2)
    spec = ProductSpaceSpec(fld, IDENTITIES[identity][0], verification_resolution(fld.n))
    rep = verify_decomposition(identity, spec, 3, seed=2)
    assert rep.passed and rep.infeasible == 0, rep.to_dict()
    assert len(rep.samples) == 3


def test_fibration_on_annulus_factor():
    fld = verification_field("key-decomp1", 2, seed=4, first=Annulus(0j, 0.5, 1.0))
    spec = ProductSpaceSpec(fld, "S_U", Resolution(4, 2, factor_degrees=(12, 4)))
    assert verify_decomposition("key-decomp1", spec, 3, seed=4).passed


def test_wrong_fiber_weight_is_detected():
    # the check is not vacuous: a 10% change of gamma on one side breaks it
    fld = verification_field("3:E4", 1, seed=3)
    spec = ProductSpaceSpec(fld, "dD_U", verification_resolution(1))
    moved = ProductSpaceSpec(fld.with_(gamma=fld.gamma.scaled(1.1)), "dD_U", spec.resolution)
    z = (0.1 + 0.2j, -0.1j)
    d, f = direct_kernel(moved, z, z), factored_kernel(spec, z, z)
    assert abs(d - f) / abs(f) == pytest.approx(1 - 1 / 1.1, rel=1e-6)


def test_wrong_jet_split_is_detected():
    fld = verification_field("eq-1", 2, seed=1)
    spec = ProductSpaceSpec(fld, "dM_U", verification_resolution(2))
    ideal = JetIdeal.total(((0.0, 1.0), (1.0,)), (1, 0), {(0,): 1.0, (1,): 0.5}, 1)
    d = extremal(spec, ideal, direct=True, seed=1).kernel_value
    base, fib, prod = factored_extremal(spec, ideal)
    assert abs(d - prod) <= 1e-8 * abs(d)
    # dropping the fiber factor is off by far more than the tolerance
    assert abs(d - base) > 1e-3 * abs(d)


def test_report_serializes_complex_samples():
    fld = verification_field("3:E4", 1, seed=0)
    spec = ProductSpaceSpec(fld, "dD_U", verification_resolution(1))
    out = verify_decomposition("3:E4", spec, 2, seed=0).to_dict()
    assert out["id"] == "3:E4" and out["selector"] == "dD_U"
    assert isinstance(out["samples"][0]["direct"], list)


def test_unknown_identity():
    fld = verification_field("3:E8", 2)
    with pytest.raises(ValueError):
        verify_decomposition("bogus", ProductSpaceSpec(fld, "M_U"))


def test_gamma_weight_scales_fiber_kernel():
    fld = verification_field("S-decomp", 2, seed=0)
    spec = ProductSpaceSpec(fld, "S_U", verification_resolution(2))
    scaled = ProductSpaceSpec(fld.with_(gamma=GammaWeight(fld.gamma.fields, 2.0)), "S_U",
                              spec.resolution)
    z = spec.base_point
    assert kernel(scaled, z, z) == pytest.approx(kernel(spec, z, z) / 2.0, rel=1e-12)
