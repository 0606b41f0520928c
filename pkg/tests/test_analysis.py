import numpy as np
import pytest

from boostybe import analysis as an, catalog
from boostybe.tensor_core import periodic_sum


class TestJordanProfile:
    def test_diagonal_matrix(self):
        p = an.jordan_profile(np.diag([1.0, 2.0, 2.0, 5.0]))
        assert p.diagonalizable
        mult = {round(e["value"].real, 6): e for e in p.eigenvalues}
        assert mult[2.0]["algebraic"] == 2
        assert mult[2.0]["geometric"] == 2

    def test_jordan_block(self):
        m = np.array([[3.0, 1, 0], [0, 3, 1], [0, 0, 3]])
        p = an.jordan_profile(m)
        assert not p.diagonalizable
        rec = p.eigenvalues[0]
        assert rec["algebraic"] == 3
        assert rec["geometric"] == 1
        assert rec["largest_block"] == 3

    def test_multiplicity_sum(self):
        rng = np.random.default_rng(0)
        m = rng.standard_normal((6, 6))
        p = an.jordan_profile(m)
        assert sum(e["algebraic"] for e in p.eigenvalues) == 6
        assert all(e["geometric"] <= e["algebraic"] for e in p.eigenvalues)

    def test_c6_generic_vs_tuned_density(self):
        pv = catalog.sample_params("C6", seed=8)
        generic = an.jordan_profile(catalog.hamiltonian("C6", pv).matrix)
        assert generic.largest_block() >= 2
        tuned = dict(pv.values)
        tuned["a2"] = 0.0
        fixed = an.jordan_profile(catalog.hamiltonian("C6", tuned).matrix)
        assert fixed.diagonalizable

    def test_close_clusters_warn(self):
        m = np.diag([1.0, 1.0 + 5e-8, 3.0])
        p = an.jordan_profile(m, tol=1e-8)
        assert p.warning is not None


class TestNilpotency:
    def test_strictly_upper_triangular(self):
        m = np.triu(np.ones((4, 4)), 1)
        assert an.nilpotency_index(m) == 4

    def test_single_superdiagonal_entry(self):
        # the C1 density with only a1 nonzero
        h = catalog.hamiltonian(
            "C1", {"a1": 1.0, "a2": 0.0, "a3": 0.0, "a4": 0.0, "a5": 0.0}
        )
        assert an.nilpotency_index(h.matrix) == 2

    def test_not_nilpotent(self):
        assert an.nilpotency_index(np.eye(3)) is None

    @pytest.mark.parametrize("family", ("C1", "C2"))
    @pytest.mark.parametrize("length", (4, 5))
    def test_class12_chains_nilpotent(self, family, length):
        pv = catalog.sample_params(family, seed=3)
        q = periodic_sum(catalog.hamiltonian(family, pv), length)
        radius = float(np.max(np.abs(np.linalg.eigvals(q))))
        assert radius < 1e-8
        index = an.nilpotency_index(q)
        assert index is not None
        assert index <= 2**length

    def test_c2_density_triangularizable(self):
        pv = catalog.sample_params("C2", seed=0)
        h = catalog.hamiltonian("C2", pv)
        # spectral radius of the periodic sum at L = 4
        q = periodic_sum(h, 4)
        assert float(np.max(np.abs(np.linalg.eigvals(q)))) < 1e-8


class TestDiagonalizabilityTable:
    """Chain-level verification of the four parameter conditions.

    The conditions characterize the periodic chain operators from L = 3 on;
    the densities themselves are too small to see the C3/C5 defect.
    """

    FIX = {
        "C3": lambda v: {**v, "a3": 0.0},
        "C4": lambda v: {**v, "a4": -v["a2"], "a3": v["a2"] ** 2 / v["a1"]},
        "C5": lambda v: {**v, "a3": -v["a2"]},
        "C6": lambda v: {**v, "a2": 0.0},
    }

    @pytest.mark.parametrize("family", ("C3", "C4", "C5", "C6"))
    def test_bidirectional(self, family):
        for seed in (8, 21):
            pv = catalog.sample_params(family, seed=seed)
            base = dict(pv.values)
            assert not an.diagonalizable_on_chain(family, base, 3)
            tuned = self.FIX[family](base)
            assert an.satisfies_diagonalizability_condition(family, tuned)
            assert an.diagonalizable_on_chain(family, tuned, 3)


class TestEigenvalueEquivalence:
    def test_c3_with_deformation_off(self):
        pv = catalog.sample_params("C3", seed=7)
        vals = dict(pv.values)
        vals["a3"] = 0.0
        assert an.eigenvalue_equivalence("C3", vals, 4, "SzSz") < 1e-8

    def test_c3_generic(self):
        pv = catalog.sample_params("C3", seed=7)
        assert an.eigenvalue_equivalence("C3", pv, 4, "SzSz") < 1e-8

    def test_c5_generic_matches_scaled_permutation_chain(self):
        pv = catalog.sample_params("C5", seed=7)
        assert an.eigenvalue_equivalence("C5", pv, 4, "OneMinus2P") < 1e-8
        s, c = an.fit_reference_scaling("C5", pv, "OneMinus2P")
        assert abs(s + pv["a1"]) < 1e-10  # s = -a1
        assert abs(c) < 1e-10

    def test_c6_degenerate_a1(self):
        pv = catalog.sample_params("C6", seed=7)
        vals = dict(pv.values)
        vals["a1"] = 0.0
        assert an.eigenvalue_equivalence("C6", vals, 3, "OneMinus2P") < 1e-8

    def test_unsupported_pairing(self):
        pv = catalog.sample_params("C3", seed=0)
        with pytest.raises(ValueError, match="pairing"):
            an.eigenvalue_equivalence("C3", pv, 4, "OneMinus2P")

    @pytest.mark.parametrize("family,ref", [("C4", "SzSz"), ("C5", "OneMinus2P"), ("C6", "OneMinus2P")])
    def test_only_a1_matters_density_level(self, family, ref):
        pv = catalog.sample_params(family, seed=7)
        base = dict(pv.values)
        h0 = catalog.hamiltonian(family, base).matrix
        rng = np.random.default_rng(5)
        for _ in range(10):
            vals = dict(base)
            for k in vals:
                if k != "a1":
                    vals[k] = 0.5 * complex(rng.standard_normal(), rng.standard_normal())
            h = catalog.hamiltonian(family, vals).matrix
            dev = np.max(
                np.abs(an.charpoly_coefficients(h) - an.charpoly_coefficients(h0))
            )
            assert dev < 1e-8

    def test_only_a1_matters_c3_chain_level(self):
        # the C3 density spectrum shifts with a2; the periodic chain's does not
        pv = catalog.sample_params("C3", seed=7)
        base = dict(pv.values)
        q0 = periodic_sum(catalog.hamiltonian("C3", base), 3)
        rng = np.random.default_rng(6)
        for _ in range(10):
            vals = dict(base)
            for k in ("a2", "a3"):
                vals[k] = 0.5 * complex(rng.standard_normal(), rng.standard_normal())
            q = periodic_sum(catalog.hamiltonian("C3", vals), 3)
            dev = np.max(
                np.abs(an.charpoly_coefficients(q / 4) - an.charpoly_coefficients(q0 / 4))
            )
            assert dev < 1e-8
