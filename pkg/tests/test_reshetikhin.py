import json

import numpy as np
import pytest

from boostybe import catalog, reshetikhin as rk
from boostybe.charges import charge_tower, q3_density, verify_commutation
from boostybe.tensor_core import (
    PauliCoeffs,
    compose_from_pauli,
    decompose_to_pauli,
    decompose_words,
)


@pytest.fixture(scope="module")
def system():
    return rk.commutator_system()


class TestSymbolicQ3:
    def test_cartan_sector_closes(self):
        a = np.zeros((4, 4), dtype=complex)
        a[0, 0], a[0, 3], a[3, 0], a[3, 3] = 0.3, -0.7, 1.1, 0.4
        out = rk.symbolic_q3(a)
        for idx in np.ndindex(4, 4, 4):
            if any(k in (1, 2) for k in idx):
                assert out[idx] == 0

    def test_class5_specialization(self):
        h = catalog.hamiltonian("C5", {"a1": 1, "a2": 1, "a3": 1})
        a = decompose_to_pauli(h).A.astype(complex)
        sym = rk.symbolic_q3(a).astype(complex)
        direct = decompose_words(q3_density(h).matrix, 3)
        assert np.allclose(sym, direct, atol=1e-12)

    def test_single_plus_minus_entry(self):
        a = np.zeros((4, 4), dtype=complex)
        a[1, 2] = 1.0  # sigma+ x sigma-
        sym = rk.symbolic_q3(a).astype(complex)
        h = compose_from_pauli(PauliCoeffs(a))
        direct = decompose_words(q3_density(h).matrix, 3)
        assert np.allclose(sym, direct, atol=1e-13)

    def test_numeric_specialization_random(self):
        rng = np.random.default_rng(8)
        for _ in range(100):
            a = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
            sym = rk.symbolic_q3(a).astype(complex)
            direct = decompose_words(
                q3_density(compose_from_pauli(PauliCoeffs(a))).matrix, 3
            )
            assert np.allclose(sym, direct, atol=1e-12)


class TestSystemStructure:
    def test_equation_count(self, system):
        assert len(system.equations) == 121

    def test_group_sizes(self, system):
        assert system.group_sizes == {
            "bulk": 81,
            "boundary3": 27,
            "boundary2": 9,
            "boundary1": 3,
            "trivial": 1,
        }

    def test_degree_bound(self, system):
        assert max(p.degree() for _, p in system.nontrivial) == 3

    def test_trivial_equation_is_zero(self, system):
        labels = dict(system.equations)
        assert labels["trivial:0000"].is_zero

    def test_interior_classes_tracked(self):
        full = rk.full_class_system()
        assert full.group_sizes["interior"] == 9
        assert len(full.equations) == 121 + 9


class TestEvaluate:
    def test_zero_point(self, system):
        assert rk.evaluate_system(system, np.zeros((4, 4))) == 0.0

    def test_identity_coeffs(self, system):
        a = np.zeros((4, 4), dtype=complex)
        a[0, 0] = 1.0
        assert rk.evaluate_system(system, a) < 1e-15

    @pytest.mark.parametrize("family", ("XYZ2", "XYZ6", "C1", "C4", "C5"))
    def test_catalog_families_satisfy(self, family, system):
        pv = catalog.sample_params(family, seed=0)
        a = decompose_to_pauli(catalog.hamiltonian(family, pv))
        assert rk.evaluate_system(system, a) < 1e-12
        assert rk.evaluate_system(rk.full_class_system(), a) < 1e-12

    def test_random_point_fails(self, system):
        rng = np.random.default_rng(9)
        a = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        assert rk.evaluate_system(system, a) > 1e-2


class TestExactWitness:
    @pytest.mark.parametrize("family", catalog.ALL_FAMILIES)
    def test_every_family_reduces_to_zero(self, family):
        assert rk.verify_family_symbolically(family) == []

    def test_witness_catches_wrong_matrix(self):
        # sanity: pushing a family off the eight-vertex pattern breaks the
        # exact witness (a sigma+ x sigma3 admixture here)
        from boostybe.exact import Poly

        coeffs, names = rk.family_symbolic_coeffs("XYZ6")
        coeffs = coeffs.copy()
        coeffs[1, 3] = coeffs[1, 3] + Poly.variable(0, len(names))
        mapping = {rk.var_index(i, j): coeffs[i, j] for i in range(4) for j in range(4)}
        system = rk.commutator_system()
        bad = [
            label
            for label, p in system.nontrivial
            if not p.subs(mapping, len(names)).is_zero
        ]
        assert bad


class TestNumericSearch:
    def test_zero_seeds(self):
        assert rk.numeric_search(0) == []

    def test_seeding_at_solution_returns_unchanged(self):
        pv = catalog.sample_params("XYZ2", seed=1)
        a = decompose_to_pauli(catalog.hamiltonian("XYZ2", pv))
        hits = rk.numeric_search([a], tolerance=1e-10)
        assert len(hits) == 1
        assert np.array_equal(hits[0].A, a.A)

    def test_hits_reverify(self):
        hits = rk.numeric_search(15, tolerance=1e-11, seed=3)
        assert hits
        for hit in hits:
            h = compose_from_pauli(hit)
            tower = charge_tower(h, 3)
            assert verify_commutation(tower, [(2, 3)], 6)[0] < 1e-8

    def test_interior_classes_needed(self):
        """At least one root of the grouped system alone violates the true
        commutator, which is why the search targets the full class system."""
        hits = rk.numeric_search(40, tolerance=1e-11, seed=5,
                                 system=rk.commutator_system())
        bad = 0
        for hit in hits:
            h = compose_from_pauli(hit)
            tower = charge_tower(h, 3)
            if verify_commutation(tower, [(2, 3)], 6)[0] > 1e-6:
                bad += 1
        assert bad >= 1


class TestSerialization:
    def test_round_trip(self, system):
        text = rk.system_to_json(system)
        records = json.loads(text)
        assert len(records) == 121
        back = rk.system_from_json(text)
        assert len(back.equations) == 121
        for (l1, p1), (l2, p2) in zip(system.equations, back.equations):
            assert l1 == l2
            assert p1 == p2

    def test_monomial_fields(self, system):
        records = json.loads(rk.system_to_json(system))
        nonzero = [r for r in records if r["monomials"]]
        mono = nonzero[0]["monomials"][0]
        assert len(mono["exps"]) == 16
        assert isinstance(mono["re"], str) and isinstance(mono["im"], str)
