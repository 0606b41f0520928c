import numpy as np
import pytest
from fractions import Fraction

from boostybe import tensor_core as tc
from boostybe.exact import GaussianRational
from boostybe.tensor_core import (
    LocalDensity,
    PauliCoeffs,
    compose_from_pauli,
    compose_words,
    decompose_to_pauli,
    decompose_words,
    embed_density,
    kron,
    periodic_sum,
    permutation_op,
    shift_operator,
    structure_constants,
    transfer_matrix,
)

RNG = np.random.default_rng(7)


def rand_complex(shape, rng=RNG):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def embed_oracle(density, site, length):
    """Brute-force embedding by acting on every basis vector."""
    r = density.range
    sites = [(site - 1 + k) % length + 1 for k in range(r)]
    dim = 2**length
    out = np.zeros((dim, dim), dtype=complex)
    for col in range(dim):
        bits = [(col >> (length - s)) & 1 for s in range(1, length + 1)]
        loc_in = 0
        for s in sites:
            loc_in = 2 * loc_in + bits[s - 1]
        for loc_out in range(2**r):
            amp = density.matrix[loc_out, loc_in]
            if amp == 0:
                continue
            new_bits = list(bits)
            for k, s in enumerate(sites):
                new_bits[s - 1] = (loc_out >> (r - 1 - k)) & 1
            row = 0
            for b in new_bits:
                row = 2 * row + b
            out[row, col] += amp
    return out


class TestKron:
    def test_identity(self):
        assert np.array_equal(kron(np.eye(2), np.eye(2)), np.eye(4))

    def test_sigma3_sigma3(self):
        got = kron(tc.SIGMA["3"], tc.SIGMA["3"])
        assert np.array_equal(got, np.diag([1, -1, -1, 1]).astype(complex))

    def test_plus_minus_single_entry(self):
        got = kron(tc.SIGMA["+"], tc.SIGMA["-"])
        expect = np.zeros((4, 4), dtype=complex)
        expect[1, 2] = 1.0  # row |12>, column |21>, 1-indexed (2,3)
        assert np.array_equal(got, expect)

    def test_associativity_exact(self):
        rng = np.random.default_rng(3)

        def rand_exact():
            m = np.empty((2, 2), dtype=object)
            for i in range(2):
                for j in range(2):
                    m[i, j] = GaussianRational(
                        Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 7))),
                        Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 7))),
                    )
            return m

        for _ in range(20):
            a, b, c = rand_exact(), rand_exact(), rand_exact()
            lhs = kron(kron(a, b), c)
            rhs = kron(a, kron(b, c))
            assert all(not (x - y) for x, y in zip(lhs.flat, rhs.flat))


class TestPermutation:
    def test_swaps_basis_vectors(self):
        p = permutation_op()
        e1 = np.array([1, 0])
        e2 = np.array([0, 1])
        assert np.array_equal(p @ kron(e1, e2), kron(e2, e1))

    def test_squares_to_identity(self):
        p = permutation_op()
        assert np.array_equal(p @ p, np.eye(4))

    def test_rows_of_identity(self):
        assert np.array_equal(permutation_op(), np.eye(4)[[0, 2, 1, 3]])


class TestEmbed:
    def test_identity_density(self):
        d = LocalDensity(2, np.eye(4, dtype=complex))
        for n in (1, 2):
            assert np.array_equal(embed_density(d, n, 3), np.eye(8))

    def test_left_placement_is_kron(self):
        d = LocalDensity(2, permutation_op())
        assert np.array_equal(embed_density(d, 1, 3), kron(permutation_op(), np.eye(2)))

    def test_wrapped_equals_shift_conjugation(self):
        d = LocalDensity(2, permutation_op())
        s = shift_operator(3)
        wrapped = embed_density(d, 3, 3, periodic=True)
        unwrapped = kron(permutation_op(), np.eye(2))
        # moving the window from sites (3,1) to (1,2) is one left shift
        assert np.allclose(wrapped, s.conj().T @ unwrapped @ s) or np.allclose(
            wrapped, s @ unwrapped @ s.conj().T
        )

    @pytest.mark.parametrize("length,site,r", [(3, 3, 2), (4, 4, 2), (5, 4, 3), (4, 2, 3)])
    def test_against_basis_action_oracle(self, length, site, r):
        d = LocalDensity(r, rand_complex((2**r, 2**r)))
        got = embed_density(d, site, length, periodic=True)
        assert np.allclose(got, embed_oracle(d, site, length))

    def test_open_chain_overflow_raises(self):
        d = LocalDensity(2, permutation_op())
        with pytest.raises(ValueError):
            embed_density(d, 3, 3, periodic=False)


class TestPeriodicSum:
    def test_identity(self):
        d = LocalDensity(2, np.eye(4, dtype=complex))
        assert np.array_equal(periodic_sum(d, 4), 4 * np.eye(16))

    def test_telescoper_sums_to_zero_exactly(self):
        # delta_A = A x 1 - 1 x A cancels around any periodic chain; with
        # exact entries the cancellation is exact, not merely small
        rng = np.random.default_rng(11)
        for _ in range(100):
            a = np.empty((2, 2), dtype=object)
            for i in range(2):
                for j in range(2):
                    a[i, j] = GaussianRational(
                        Fraction(int(rng.integers(-20, 21)), int(rng.integers(1, 9))),
                        Fraction(int(rng.integers(-20, 21)), int(rng.integers(1, 9))),
                    )
            one = tc.identity(2, like=a)
            delta = kron(a, one) - kron(one, a)
            d = LocalDensity(2, delta)
            length = int(rng.integers(2, 7))
            total = periodic_sum(d, length)
            assert all(not x for x in total.flat)

    def test_szsz_diagonal(self):
        d = LocalDensity(2, kron(tc.SIGMA["3"], tc.SIGMA["3"]))
        got = periodic_sum(d, 3)
        # oracle: direct diagonal summation
        diag = np.zeros(8)
        for idx in range(8):
            bits = [(idx >> k) & 1 for k in (2, 1, 0)]
            z = [1 - 2 * b for b in bits]
            diag[idx] = sum(z[n] * z[(n + 1) % 3] for n in range(3))
        assert np.allclose(got, np.diag(diag))
        assert got[0, 0] == 3.0  # the |111> entry


class TestTransfer:
    def test_constant_p_gives_shift(self):
        for length in (2, 3, 4):
            t = transfer_matrix(lambda u: permutation_op(), 0.37, length)
            assert np.allclose(t, shift_operator(length))

    def test_shift_action(self):
        u = shift_operator(3)
        # |100> (index 4) -> |010> (index 2)
        v = np.zeros(8)
        v[4] = 1.0
        assert np.argmax(np.abs(u @ v)) == 2
        assert np.allclose(np.linalg.matrix_power(u, 3), np.eye(8))


class TestPauli:
    def test_identity_coeffs(self):
        d = LocalDensity(2, np.eye(4, dtype=complex))
        a = decompose_to_pauli(d).A
        expect = np.zeros((4, 4), dtype=complex)
        expect[0, 0] = 1.0
        assert np.allclose(a, expect)

    def test_plus_minus(self):
        d = LocalDensity(2, kron(tc.SIGMA["+"], tc.SIGMA["-"]))
        a = decompose_to_pauli(d).A
        expect = np.zeros((4, 4), dtype=complex)
        expect[1, 2] = 1.0
        assert np.allclose(a, expect)

    def test_round_trip_float(self):
        rng = np.random.default_rng(5)
        for _ in range(100):
            a = PauliCoeffs(rand_complex((4, 4), rng))
            back = decompose_to_pauli(compose_from_pauli(a)).A
            assert np.allclose(back, a.A, atol=1e-13)

    def test_round_trip_exact(self):
        rng = np.random.default_rng(6)
        for _ in range(20):
            arr = np.empty((4, 4), dtype=object)
            for i in range(4):
                for j in range(4):
                    arr[i, j] = GaussianRational(
                        Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 5))),
                        Fraction(int(rng.integers(-9, 10)), int(rng.integers(1, 5))),
                    )
            back = decompose_to_pauli(compose_from_pauli(PauliCoeffs(arr))).A
            assert all(not (x - y) for x, y in zip(back.flat, arr.flat))

    def test_dual_pairing(self):
        for la in tc.PAULI_LABELS:
            for lb in tc.PAULI_LABELS:
                tr = np.trace(tc.DUAL[la] @ tc.SIGMA[lb])
                assert np.isclose(tr, 1.0 if la == lb else 0.0)


class TestStructureConstants:
    def test_identity_row(self):
        f = structure_constants()
        for b in range(4):
            for c in range(4):
                want = 1 if b == c else 0
                assert not (f[0, b, c] - GaussianRational.of(want))

    def test_sigma3_squared(self):
        f = structure_constants()
        assert complex(f[3, 3, 0]) == 1
        assert all(complex(f[3, 3, c]) == 0 for c in (1, 2, 3))

    def test_plus_minus_product(self):
        f = structure_constants()
        # sigma+ sigma- = (sigma0 + sigma3)/2
        assert complex(f[1, 2, 0]) == 0.5
        assert complex(f[1, 2, 3]) == 0.5

    def test_reproduces_all_products(self):
        f = structure_constants()
        for a, la in enumerate(tc.PAULI_LABELS):
            for b, lb in enumerate(tc.PAULI_LABELS):
                prod = tc.SIGMA[la] @ tc.SIGMA[lb]
                recon = sum(
                    complex(f[a, b, c]) * tc.SIGMA[lc]
                    for c, lc in enumerate(tc.PAULI_LABELS)
                )
                assert np.allclose(prod, recon)


class TestWords:
    def test_round_trip(self):
        for n in (1, 2, 3, 4):
            m = rand_complex((2**n, 2**n))
            c = decompose_words(m, n)
            assert c.shape == (4,) * n
            assert np.allclose(compose_words(c), m, atol=1e-12)

    def test_single_word(self):
        m = kron(tc.SIGMA["+"], tc.SIGMA["3"], tc.SIGMA["0"])
        c = decompose_words(m, 3)
        expect = np.zeros((4, 4, 4), dtype=complex)
        expect[1, 3, 0] = 1.0
        assert np.allclose(c, expect)
