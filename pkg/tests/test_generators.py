import numpy as np
import pytest

from wlcheck.errors import (BetaRequiredError, BetaZeroError, ClosureError,
                            KinematicsMismatch, UnknownCatalogKeyError)
from wlcheck.families import make_family
from wlcheck.generators import (BETA_KEYS, CATALOG_KEYS, EPS, _make_spec,
                                _single, build_generator, catalog,
                                combine_fields, evaluate_field, field_jet,
                                format_combo)
from wlcheck.phasespace import (AccelerationLaw, PhasePoint, SamplingDomain,
                                sample_points)


def _spec_for(key):
    return catalog(key, beta=0.7) if key in BETA_KEYS else catalog(key)


def test_levi_civita_table():
    assert EPS[0, 1, 2] == 1.0
    assert EPS[1, 0, 2] == -1.0
    assert EPS[2, 0, 1] == 1.0
    assert EPS[0, 0, 1] == 0.0


def test_translation_and_boost_coefficients():
    p = PhasePoint([[1.0, 2.0, 3.0]], [[0.1, 0.2, 0.3]])
    p2 = evaluate_field(build_generator("P2", n_particles=1), p)
    assert np.allclose(p2, [0, 1, 0, 0, 0, 0])
    g3 = evaluate_field(build_generator("G3", n_particles=1), p)
    assert np.allclose(g3, [0, 0, 0, 0, 0, -1])


def test_rotation_coefficients_hand_value():
    # J3 at x = (1,0,0), v = (0,1,0): xi = (0,1,0), eta = (-1,0,0)
    p = PhasePoint([[1.0, 0.0, 0.0]], [[0.0, 1.0, 0.0]])
    j3 = evaluate_field(build_generator("J3", n_particles=1), p)
    assert np.allclose(j3, [0, 1, 0, -1, 0, 0])


def test_hamiltonian_coefficients():
    law = AccelerationLaw.from_expressions([["0", "0", "x3"]],
                                           kinematics="galilean")
    p = PhasePoint([[0.0, 0.0, 2.0]], [[0.4, 0.5, 0.6]])
    h = evaluate_field(build_generator("H", law=law), p)
    assert np.allclose(h, [0.4, 0.5, 0.6, 0.0, 0.0, 2.0])


def test_boost_k_free_law_hand_value():
    # K1 with A = 0 at x = (1,0,0), v = (0,0.5,0):
    # xi = x1 * v = (0, 0.5, 0), eta_j = v1 v_j - delta_1j = (-1, 0, 0)
    free = make_family("free")
    p = PhasePoint([[1.0, 0.0, 0.0]], [[0.0, 0.5, 0.0]])
    k1 = evaluate_field(build_generator("K1", law=free), p)
    assert np.allclose(k1, [0.0, 0.5, 0.0, -1.0, 0.0, 0.0])


def test_generators_act_diagonally_across_particles():
    p = PhasePoint([[1.0, 0.0, 0.0], [0.0, 2.0, 0.0]],
                   [[0.0, 1.0, 0.0], [0.0, 0.0, 3.0]])
    j3 = evaluate_field(build_generator("J3", n_particles=2), p)
    # flat layout: positions for both particles, then velocities for both
    assert np.allclose(j3[:6], [0, 1, 0, -2, 0, 0])
    assert np.allclose(j3[6:], [-1, 0, 0, 0, 0, 0])


def test_combine_fields_hand_value():
    # (1*G1 - J2) at x = (0,0,1), v = 0
    g1 = build_generator("G1", n_particles=1)
    j2 = build_generator("J2", n_particles=1)
    combo = combine_fields([(1.0, g1), (-1.0, j2)])
    p = PhasePoint([[0.0, 0.0, 1.0]], [[0.0, 0.0, 0.0]])
    assert np.allclose(evaluate_field(combo, p), [-1, 0, 0, -1, 0, 0])


def test_combine_fields_is_linear():
    free = make_family("free")
    p = PhasePoint([[0.3, -0.2, 0.5]], [[0.1, 0.4, -0.6]])
    h = build_generator("H", law=free)
    j1 = build_generator("J1", n_particles=1)
    combo = combine_fields([(2.0, h), (-0.5, j1)])
    direct = 2.0 * evaluate_field(h, p) - 0.5 * evaluate_field(j1, p)
    assert np.allclose(evaluate_field(combo, p), direct)


def test_format_combo():
    assert format_combo(((1.0, "G1"), (-1.0, "J2"))) == "G1-J2"
    assert format_combo(((0.5, "G1"), (1.0, "J2"))) == "0.5*G1+J2"
    assert format_combo(((1.0, "H"),)) == "H"


def test_requesting_k_for_galilean_law_warns():
    law = AccelerationLaw(1, lambda x, v: [[0, 0, 0]],
                          kinematics="galilean")
    with pytest.warns(KinematicsMismatch):
        build_generator("K1", law=law)


def test_catalog_dimensions():
    want = {"full-galilei": 10, "full-poincare": 10, "galilei-static": 7,
            "galilei-very-special": 7, "galilei-anisotropic": 8,
            "poincare-vsr": 7, "poincare-most-special": 8,
            "homogeneous-galilei": 6, "homogeneous-poincare": 6}
    for key in CATALOG_KEYS:
        assert _spec_for(key).dimension == want[key]


def test_catalog_key_aliases_and_unknown():
    assert catalog("full_galilei").name == "full-galilei"
    with pytest.raises(UnknownCatalogKeyError):
        catalog("full-newton")


def test_beta_requirements():
    with pytest.raises(BetaRequiredError):
        catalog("galilei-very-special")
    with pytest.raises(BetaRequiredError):
        catalog("poincare-vsr")
    with pytest.raises(BetaZeroError):
        catalog("poincare-vsr", beta=0.0)
    # the galilean analogue tolerates beta = 0
    assert catalog("galilei-very-special", beta=0.0).dimension == 7


def test_mixed_generator_bracket_is_rotation():
    # [beta G1 + J2, beta G2 - J1] = -J3 for every beta
    for b in (0.5, 1.0, 2.0):
        spec = catalog("galilei-very-special", beta=b)
        names = spec.basis_names
        a = next(i for i, n in enumerate(names) if "G1" in n)
        c = next(i for i, n in enumerate(names) if "G2" in n)
        j3 = names.index("J3")
        want = np.zeros(spec.dimension)
        want[j3] = -1.0
        assert np.allclose(spec.struct[a, c], want)


def test_relativistic_mixed_bracket_interpolates():
    # [K1 + beta J2, K2 - beta J1] = (1 - beta^2) J3; zero at beta = 1
    for b in (0.5, 1.0, 2.0):
        spec = catalog("poincare-vsr", beta=b)
        names = spec.basis_names
        a = next(i for i, n in enumerate(names) if "K1" in n)
        c = next(i for i, n in enumerate(names) if "K2" in n)
        j3 = names.index("J3")
        want = np.zeros(spec.dimension)
        want[j3] = 1.0 - b * b
        assert np.allclose(spec.struct[a, c], want)


def test_most_special_closes_with_k3():
    spec = catalog("poincare-most-special")
    assert spec.beta == 1.0
    assert "K3" in spec.basis_names
    names = spec.basis_names
    a = names.index("K3")
    c = next(i for i, n in enumerate(names) if n.startswith("K1"))
    # [K3, K1 + J2] = J2 + K1, i.e. the same mixed generator again
    want = np.zeros(spec.dimension)
    want[c] = 1.0
    assert np.allclose(spec.struct[a, c], want)


def test_structure_constants_satisfy_jacobi():
    for key in CATALOG_KEYS:
        c = _spec_for(key).struct
        total = np.einsum("abm,mde->abde", c, c) \
            + np.einsum("bdm,mae->abde", c, c) \
            + np.einsum("dam,mbe->abde", c, c)
        assert np.max(np.abs(total)) < 1e-9


def test_non_closing_basis_raises():
    # span{P1, J2} is not a subalgebra: [J2, P1] = P3 leaves it
    with pytest.raises(ClosureError):
        _make_spec("bogus", "galilean", None,
                   [_single("P1"), _single("J2")])


def test_free_law_reproduces_structure_constants_numerically():
    """The defining property of the tables: numeric commutators of the basis
    fields for A = 0 match the stored constants at every sampled point."""
    free = make_family("free")
    dom = SamplingDomain(seed=19)
    pts = sample_points(dom, 6, 1)
    for key in CATALOG_KEYS:
        spec = _spec_for(key)
        fields = spec.fields(law=free)
        for p in pts:
            jets = [field_jet(f, p) for f in fields]
            vals = np.array([v for v, _ in jets])
            for a in range(spec.dimension):
                for b in range(a + 1, spec.dimension):
                    va, ja = jets[a]
                    vb, jb = jets[b]
                    bracket = jb @ va - ja @ vb
                    want = spec.struct[a, b] @ vals
                    assert np.abs(bracket - want).max() < 1e-9, \
                        (key, spec.basis_names[a], spec.basis_names[b])


def test_field_jet_jacobian_hand_value():
    # H for A = v: values (v, v), jacobian d(xi_i)/dv_i = 1, d(eta_i)/dv_i = 1
    law = AccelerationLaw.from_expressions([["v1", "v2", "v3"]],
                                           kinematics="galilean")
    h = build_generator("H", law=law)
    p = PhasePoint([[0.0, 0.0, 0.0]], [[0.1, 0.2, 0.3]])
    vals, jac = field_jet(h, p)
    assert np.allclose(vals, [0.1, 0.2, 0.3, 0.1, 0.2, 0.3])
    want = np.zeros((6, 6))
    want[0:3, 3:6] = np.eye(3)
    want[3:6, 3:6] = np.eye(3)
    assert np.allclose(jac, want)
