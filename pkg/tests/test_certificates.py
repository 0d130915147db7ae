import numpy as np
import pytest

from affinecert.affine import AffineMap, conjugate
from affinecert.certificates import (Certificate, GroupSpec, check_certificate,
                                     direction_set_estimate,
                                     eigenvalue_one_screen,
                                     four_transversal_config,
                                     margulis3d_example, nonproper_witness,
                                     opposite_sign_example,
                                     opposite_sign_search, proper_scan,
                                     sign_gadget_build)
from affinecert.classify import classification_lookup, listed_entries
from affinecert.dynamics import AmbientGroup, transversality
from affinecert.errors import (NotTransversal, NoVerifiedN, UnknownDescriptor)
from affinecert.signs import ProductSplit, QuadraticForm, margulis_alpha

from conftest import boost, rot
from test_signs import random_so


def plain_spec(*maps):
    dim = maps[0].dim
    return GroupSpec(dim=dim, generators=list(maps),
                     ambient=AmbientGroup.generic(0, 0))


class TestEigenvalueOneScreen:
    def test_expanding_generator_flagged_at_length_one(self):
        g = AffineMap(np.diag([2.0, 3.0, 1.0 / 6.0]), [1.0, 0.0, 0.0], name="a")
        certs = eigenvalue_one_screen(plain_spec(g), 2)
        assert certs
        assert certs[0].words == ["a"]
        assert certs[0].witness["residual"] < 1e-10

    def test_margulis_example_clean(self):
        spec = margulis3d_example(np.log(4.0), np.pi / 2, 10.0)
        assert eigenvalue_one_screen(spec, 4) == []

    def test_rotation_with_expansion_flagged(self):
        m = np.zeros((4, 4))
        m[:2, :2] = [[0.0, -1.0], [1.0, 0.0]]
        m[2:, 2:] = np.diag([2.0, 0.5])
        g = AffineMap(m, np.zeros(4), name="a")
        certs = eigenvalue_one_screen(plain_spec(g), 1)
        assert len(certs) == 2  # a and a^-1
        assert certs[0].words == ["a"]


class TestOppositeSignSearch:
    def test_builtin_pair_found_at_length_one(self):
        spec = opposite_sign_example()
        cert = opposite_sign_search(spec, 1)
        assert cert is not None
        assert cert.words == ["a", "b"]
        a1, a2 = cert.witness["alphas"]
        assert a1 == pytest.approx(1.0, abs=1e-10)
        assert a2 == pytest.approx(-1.0, abs=1e-10)
        assert cert.witness["transversality"] > 0.1
        ok, _ = check_certificate(cert)
        assert ok

    def test_margulis_example_has_no_pair(self):
        spec = margulis3d_example(np.log(4.0), np.pi / 2, 10.0)
        assert opposite_sign_search(spec, 4) is None

    def test_single_generator_absent(self):
        g = AffineMap(boost(np.log(2.0)), [0.0, 1.0, 0.0], name="a")
        spec = GroupSpec(dim=3, generators=[g], ambient=AmbientGroup.so_pq(2, 1),
                         form=QuadraticForm(2, 1))
        assert opposite_sign_search(spec, 4) is None

    def test_conjugation_stability(self, rng):
        spec = opposite_sign_example()
        cert = opposite_sign_search(spec, 2)
        x = AffineMap(random_so(rng, 2, 1), rng.standard_normal(3))
        moved_gens = []
        for g in spec.generators:
            gm = conjugate(x, g)
            gm.name = g.name
            moved_gens.append(gm)
        moved = GroupSpec(dim=3, generators=moved_gens,
                          ambient=spec.ambient, form=spec.form)
        cert2 = opposite_sign_search(moved, 2)
        assert cert2 is not None
        assert cert2.words == cert.words
        assert np.allclose(cert2.witness["alphas"], cert.witness["alphas"], atol=1e-7)


class TestNonproperWitness:
    def test_builtin_pair_many_exponents(self):
        spec = opposite_sign_example()
        g, h = spec.generators
        cert = nonproper_witness(g, h, sign_data={"alphas": [1.0, -1.0]},
                                 n_max=200, radius=1.0)
        assert cert.kind == "BallIntersectionWitness"
        assert len(cert.witness["verified"]) >= 10
        ok, messages = check_certificate(cert)
        assert ok, messages

    def test_same_element_rejected(self):
        spec = opposite_sign_example()
        g = spec.generators[0]
        with pytest.raises(NotTransversal):
            nonproper_witness(g, g)

    def test_commuting_shared_axis(self):
        g = AffineMap(boost(np.log(2.0)), [0.0, 1.0, 0.0], name="g")
        h = AffineMap(boost(np.log(2.0)) @ boost(np.log(2.0)), [0.0, 2.0, 0.0], name="h")
        cert = nonproper_witness(g, h)
        assert cert.kind == "AxesIntersect"
        ok, _ = check_certificate(cert)
        assert ok

    def test_monotone_verification(self):
        # within the exponent range float arithmetic can certify at all,
        # verification holds for essentially every exponent past the first
        spec = opposite_sign_example()
        g, h = spec.generators
        cert = nonproper_witness(g, h, n_max=12, radius=1.0)
        ns = [e["n"] for e in cert.witness["verified"]]
        first = ns[0]
        later = list(range(first, 13))
        assert len(ns) >= 0.8 * len(later)

    def test_same_sign_pair_has_no_verified_exponent(self):
        # transversal pair marching the same way: the construction cannot
        # close up and every exponent fails the ball check
        spec = margulis3d_example(np.log(2.0), np.pi / 2, 1.0)
        a, b = spec.generators
        with pytest.raises(NoVerifiedN):
            nonproper_witness(a, b, n_max=40, radius=0.05)

    def test_prop_mode_parallel_axes(self):
        # h = t g^-1 t^-1 in a setting with a globally fixed translation
        # direction, so the axis translations cancel and the axes are
        # parallel but disjoint
        lin_g = np.diag([2.0, 0.5, 1.0])
        g = AffineMap(lin_g, [0.0, 0.0, 1.0], name="g")
        c, s = np.cos(np.pi / 4), np.sin(np.pi / 4)
        lin_t = np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
        t = AffineMap(lin_t, [3.0, 0.0, 0.0], name="t")
        h = conjugate(t, g.inverse())
        h.name = "h"
        from affinecert.affine import invariant_axis
        assert np.allclose(invariant_axis(h).direction, [0.0, 0.0, -1.0], atol=1e-10)
        cert = nonproper_witness(g, h, n_max=150, radius=1.0)
        assert cert.kind == "BallIntersectionWitness"
        assert len(cert.witness["verified"]) >= 10
        ok, messages = check_certificate(cert)
        assert ok, messages


class TestProperScan:
    def test_far_translation_returns_identity_only(self):
        g = AffineMap(np.eye(3), [10.0, 0.0, 0.0], name="a")
        cert = proper_scan(plain_spec(g), np.zeros(3), 1.0, 5)
        assert cert.words == ["1"]

    def test_empty_spec_returns_identity(self):
        spec = GroupSpec(dim=3, generators=[], ambient=AmbientGroup.generic(0, 0))
        cert = proper_scan(spec, np.zeros(3), 1.0, 5)
        assert cert.words == ["1"]

    def test_opposite_sign_spec_returns_grow(self):
        spec = opposite_sign_example()
        cert = proper_scan(spec, np.zeros(3), 1.0, 4)
        assert len(cert.words) > 1
        by_len = cert.witness["returns_by_length"]
        assert sum(v for k, v in by_len.items() if k != "0") > 0
        ok, _ = check_certificate(cert)
        assert ok

    def test_margulis_example_scan_small(self):
        spec = margulis3d_example(np.log(4.0), np.pi / 2, 10.0)
        cert = proper_scan(spec, np.zeros(3), 1.0, 4)
        assert cert.words == ["1"]


class TestDirectionEstimate:
    def test_single_translation(self):
        g = AffineMap(np.eye(3), [2.0, 0.0, 0.0], name="a")
        sample = direction_set_estimate(plain_spec(g), np.zeros(3), 0.05, 3)
        dirs = {tuple(np.round(e["direction"], 6)) for e in sample.directions}
        assert (1.0, 0.0, 0.0) in dirs
        assert (-1.0, 0.0, 0.0) in dirs
        assert len(dirs) == 2

    def test_two_translations_include_diagonal(self):
        a = AffineMap(np.eye(2), [1.0, 0.0], name="a")
        b = AffineMap(np.eye(2), [0.0, 1.0], name="b")
        sample = direction_and(a, b)
        dirs = [e["direction"] for e in sample.directions]
        expected = np.array([1.0, 1.0]) / np.sqrt(2)
        assert any(np.allclose(d, [1.0, 0.0], atol=1e-9) for d in dirs)
        assert any(np.allclose(d, [0.0, 1.0], atol=1e-9) for d in dirs)
        assert any(np.allclose(d, expected, atol=1e-9) for d in dirs)

    def test_margulis_directions_avoid_timelike_cone(self):
        # golden snapshot of the proper example: every realized displacement
        # direction stays out of the open negative cone (seed 0, length 3)
        spec = margulis3d_example(np.log(4.0), np.pi / 2, 10.0)
        sample = direction_set_estimate(spec, np.zeros(3), 1.0, 3, seed=0)
        assert len(sample.directions) == 354
        form = QuadraticForm(2, 1)
        values = [form.qform(e["direction"]) for e in sample.directions]
        assert min(values) > -0.05


def direction_and(a, b):
    spec = GroupSpec(dim=2, generators=[a, b], ambient=AmbientGroup.generic(0, 0))
    return direction_set_estimate(spec, np.zeros(2), 0.05, 2)


class TestFourTransversalConfig:
    def test_rotated_boosts(self):
        gens = []
        for i, theta in enumerate((0.0, np.pi / 3, 2 * np.pi / 3, np.pi / 2)):
            lin = rot(theta) @ boost(np.log(2.0)) @ rot(-theta)
            gens.append(AffineMap(lin, np.zeros(3), name=f"g{i}"))
        spec = GroupSpec(dim=3, generators=gens, ambient=AmbientGroup.so_pq(2, 1),
                         form=QuadraticForm(2, 1))
        config = four_transversal_config(spec, 1)
        assert config is not None
        vec = config["cone_vector"]
        form = QuadraticForm(2, 1)
        assert form.qform(vec) < -1e-6 * np.dot(vec, vec)

    def test_too_few_elements(self):
        g = AffineMap(boost(0.7), np.zeros(3), name="a")
        spec = GroupSpec(dim=3, generators=[g], ambient=AmbientGroup.so_pq(2, 1),
                         form=QuadraticForm(2, 1))
        assert four_transversal_config(spec, 2) is None


class TestClassification:
    def test_so32_dim5(self):
        entry = classification_lookup(5, "SO(3,2)")
        assert entry.verdict == "PossibleLinearPart"
        assert entry.tag == "case2.1"

    def test_product_case_dim6(self):
        entry = classification_lookup(6, "SO(2,1)xSL3(R)")
        assert entry.verdict == "PossibleLinearPart"
        assert entry.tag == "case2.3"
        assert "opposite-sign" in entry.mechanism

    def test_sl3_dim4(self):
        entry = classification_lookup(4, "SL3(R)")
        assert entry.verdict == "PossibleLinearPart"
        assert entry.tag == "case1.1"

    def test_not_in_tables(self):
        entry = classification_lookup(3, "SL3(R)")
        assert entry.verdict == "NotInTables"

    def test_excluded_group(self):
        entry = classification_lookup(3, "SO(2,1)")
        assert entry.verdict == "ExcludedByClassification"

    def test_unknown_descriptor(self):
        with pytest.raises(UnknownDescriptor):
            classification_lookup(5, "E8")

    def test_normalization(self):
        assert classification_lookup(6, "so(2,1) x sl3(r)").tag == "case2.3"

    def test_listed_count(self):
        assert len(listed_entries()) >= 12


class TestMargulisExample:
    def test_alphas_equal_translation_scale(self):
        spec = margulis3d_example(np.log(4.0), np.pi / 2, 10.0)
        form = spec.form
        for g in spec.generators:
            assert margulis_alpha(g, form).alpha == pytest.approx(10.0, abs=1e-9)

    def test_generators_transversal(self):
        spec = margulis3d_example(np.log(4.0), np.pi / 2, 10.0)
        a, b = spec.generators
        assert transversality(a, b) > 0.1

    def test_degenerate_angle_rejected(self):
        from affinecert.certificates import DegenerateAngle
        with pytest.raises(DegenerateAngle):
            margulis3d_example(1.0, 0.0, 1.0)


def product_spec():
    """SO(2,1) x SL3 product group with mixing generators for gadget tests."""
    p = np.zeros((6, 6))
    p[:3, :3] = boost(0.8)
    p[3:, 3:] = np.diag([2.0, 0.75, 2.0 / 3.0])
    axis = np.array([0.3, 0.5, 0.81])
    axis /= np.linalg.norm(axis)
    k = np.array([[0.0, -axis[2], axis[1]],
                  [axis[2], 0.0, -axis[0]],
                  [-axis[1], axis[0], 0.0]])
    import scipy.linalg
    r3 = scipy.linalg.expm(0.9 * k)
    r = np.zeros((6, 6))
    r[:3, :3] = rot(0.9)
    r[3:, 3:] = r3
    gen_p = AffineMap(p, [0.0, 1.0, 0.0, 0.0, 0.0, 0.0], name="p")
    gen_r = AffineMap(r, [0.0, 0.0, 0.0, 0.2, 0.0, 0.0], name="r")
    return GroupSpec(dim=6, generators=[gen_p, gen_r],
                     ambient=AmbientGroup.product_so21_sl3(),
                     product_split=ProductSplit.standard())


class TestSignGadget:
    def test_conditions(self):
        spec = product_spec()
        config = four_transversal_config(spec, 5)
        assert config is not None
        gadget = sign_gadget_build(spec, config["elements"], delta=0.35,
                                   word_len=4, n_budget=16, power_budget=24,
                                   mesh=150)
        assert gadget["q"] < 1.0
        assert gadget["eps"] > 0.0
        for group in gadget["s_sets"]:
            assert len(group) == 3
            for entry in group:
                assert entry["theta2_minus"].dim == 2
            normals = np.column_stack(
                [e["theta2_minus"].orthogonal_complement().basis[:, 0] for e in group])
            assert np.linalg.svd(normals, compute_uv=False)[-1] > 1e-6
        for group in gadget["t_sets"]:
            assert len(group) == 3
            for entry in group:
                assert entry["theta2_minus"].dim == 1
            stacked = np.column_stack([e["theta2_minus"].basis[:, 0] for e in group])
            assert np.linalg.svd(stacked, compute_uv=False)[-1] > 1e-6
        for value in gadget["d_constants"].values():
            assert value > 0.0


class TestCheckCertificate:
    def test_tampered_witness_fails(self):
        spec = opposite_sign_example()
        g, h = spec.generators
        cert = nonproper_witness(g, h, n_max=50, radius=1.0)
        cert.witness["verified"][0]["y"] = [100.0, 100.0, 100.0]
        ok, _ = check_certificate(cert)
        assert not ok

    def test_tampered_alpha_fails(self):
        spec = opposite_sign_example()
        cert = opposite_sign_search(spec, 1)
        cert.witness["alphas"] = [1.0, 1.0]
        ok, _ = check_certificate(cert)
        assert not ok
