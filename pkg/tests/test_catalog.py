import cmath

import numpy as np
import pytest

from boostybe import catalog, ybe_verify as yv
from boostybe.tensor_core import permutation_op

P = permutation_op()


class TestHamiltonians:
    def test_xyz1_is_diagonal(self):
        h = catalog.hamiltonian("XYZ1", {"a1": 1, "b1": 2, "b2": 3, "a2": 4})
        assert np.array_equal(h.matrix, np.diag([1, 2, 3, 4]).astype(complex))

    def test_c1_constraint_rejected(self):
        with pytest.raises(ValueError, match="constraint"):
            catalog.hamiltonian(
                "C1", {"a1": 1, "a2": 0, "a3": 1, "a4": 0, "a5": 2}
            )

    def test_c6_offdiagonal_pattern(self):
        h = catalog.hamiltonian("C6", {"a1": 0, "a2": 2}).matrix
        expect = np.array(
            [[0, 2, 2, 0], [0, 0, 0, -2], [0, 0, 0, -2], [0, 0, 0, 0]], dtype=complex
        )
        assert np.array_equal(h, expect)

    def test_xyz3_corner_is_derived(self):
        # the corner is pinned by the branch a1 + a2 = b1 + b2 of the exact
        # six-vertex integrability condition
        pv = catalog.sample_params("XYZ3", seed=9)
        h = catalog.hamiltonian("XYZ3", pv).matrix
        assert np.isclose(h[3, 3], pv["b1"] + pv["b2"] - pv["a1"])

    def test_display_strings(self):
        disp = catalog.hamiltonian_display("XYZ5")
        assert disp[3][3] == "a1-c1-c2"
        disp7 = catalog.hamiltonian_display("XYZ7")
        assert disp7[3][3] == "2*b1-a1"


class TestRMatrices:
    def test_r5_regular_exactly(self):
        pv = catalog.sample_params("C5", seed=0)
        r = catalog.rmatrix("C5", pv)
        assert np.array_equal(r(0.0), P)

    def test_r1_exponential_entries(self):
        pv = catalog.sample_params("C1", seed=1)
        r = catalog.rmatrix("C1", pv)
        u = 0.21 - 0.08j
        a5 = pv["a5"]
        m = r(u)
        assert np.isclose(m[1, 2], cmath.exp(-a5 * u))
        assert np.isclose(m[2, 1], cmath.exp(a5 * u))

    def test_c2_small_a1_limit(self):
        base = dict(catalog.sample_params("C2", seed=2).values)
        base["a1"] = 1e-6
        r = catalog.rmatrix("C2", base)
        u = 0.3
        h = catalog.hamiltonian("C2", base).matrix
        limit = u * P @ (np.eye(4) / u + h + (u / 2) * h @ h)
        assert np.allclose(r(u), limit, atol=1e-10)

    def test_xyz_has_no_closed_form(self):
        with pytest.raises(ValueError, match="series"):
            catalog.rmatrix("XYZ2", catalog.sample_params("XYZ2", seed=0))

    def test_c2_singularity_rejected(self):
        vals = dict(catalog.sample_params("C2", seed=3).values)
        vals["a1"] = 2.0
        r = catalog.rmatrix("C2", vals)
        bad = 1j * cmath.pi / 2.0
        assert r.nearest_singularity(bad) is not None
        with pytest.raises(ValueError, match="singular"):
            r(bad)

    @pytest.mark.parametrize("family", catalog.CLASS_FAMILIES)
    def test_extraction_matches_hamiltonian(self, family):
        for seed in range(5):
            pv = catalog.sample_params(family, seed=seed)
            r = catalog.rmatrix(family, pv)
            h = catalog.hamiltonian(family, pv)
            got = yv.extract_hamiltonian(r)
            assert np.linalg.norm(got.matrix - h.matrix) < 1e-8

    @pytest.mark.parametrize("family", catalog.CLASS_FAMILIES)
    def test_braiding_unitarity(self, family):
        pv = catalog.sample_params(family, seed=7)
        r = catalog.rmatrix(family, pv)
        assert yv.braiding_unitarity_check(r, samples=20) < 1e-9

    def test_c4_small_a1_analytic_limit(self):
        vals = dict(catalog.sample_params("C4", seed=1).values)
        vals["a1"] = 1e-7
        r = catalog.rmatrix("C4", vals)
        u = 0.25
        m = r(u)
        a2, a3, a4 = vals["a2"], vals["a3"], vals["a4"]
        expect = np.array(
            [
                [1, a2 * u, a2 * u, a3 * u + a2 * a4 * u * u],
                [0, 0, 1, a4 * u],
                [0, 1, 0, a4 * u],
                [0, 0, 0, 1],
            ],
            dtype=complex,
        )
        assert np.allclose(m, expect, atol=1e-6)


class TestCayleyHamiltonDeformation:
    def test_c3_deformation_enters_only_through_h(self):
        """The fitted scalar functions agree between a3 = 0 and a3 = 1."""
        base = {"a1": 0.4 + 0.1j, "a2": -0.3 + 0.2j, "a3": 0.0}
        fits = {}
        for a3 in (0.0, 1.0):
            vals = dict(base)
            vals["a3"] = a3
            sol = yv.series_solve(catalog.hamiltonian("C3", vals), 5)
            fits[a3] = yv.ch_fit(sol)
        us = [0.05 * k for k in range(1, 11)]
        for j in range(4):
            for u in us:
                f0 = fits[0.0].f_function(j, u)
                f1 = fits[1.0].f_function(j, u)
                assert abs(f0 - f1) < 1e-8


class TestMetadata:
    def test_fourteen_families(self):
        assert len(catalog.list_families()) == 14
        closed = [f for f in catalog.list_families() if f["has_closed_R"]]
        assert [f["family"] for f in closed] == list(catalog.CLASS_FAMILIES)

    def test_sample_c1_satisfies_constraint(self):
        for seed in range(10):
            pv = catalog.sample_params("C1", seed=seed)
            v = pv.values
            assert abs(v["a1"] * v["a3"] - v["a2"] * v["a4"]) < 1e-14

    def test_sample_is_deterministic(self):
        a = catalog.sample_params("C5", seed=42)
        b = catalog.sample_params("C5", seed=42)
        assert a.values == b.values

    def test_unknown_family(self):
        with pytest.raises(KeyError):
            catalog.family_info("C9")
