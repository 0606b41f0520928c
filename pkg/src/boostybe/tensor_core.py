"""Dense operator algebra on tensor products of C^2.

Conventions used throughout the package:

* Basis of (C^2)^{tensor L} is lexicographic with site 1 as the slowest
  index, so ``kron(A, B)`` puts A on the lower-numbered site.
* The extended Pauli basis is ``sigma^0 = 1``, ``sigma^+ = (sx + i sy)/2``,
  ``sigma^- = (sx - i sy)/2``, ``sigma^3 = sz``, in the fixed label order
  ``("0", "+", "-", "3")``.
* All functions accept complex128 arrays, and the ones that only move or
  add entries (kron, embeddings, periodic sums, Pauli pairing) also work on
  object arrays with exact entries.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .exact import GR_HALF, GR_ONE, GR_ZERO, GaussianRational

PAULI_LABELS = ("0", "+", "-", "3")

SIGMA = {
    "0": np.eye(2, dtype=complex),
    "+": np.array([[0, 1], [0, 0]], dtype=complex),
    "-": np.array([[0, 0], [1, 0]], dtype=complex),
    "3": np.array([[1, 0], [0, -1]], dtype=complex),
}

# trace-dual basis: tr(DUAL[a] @ SIGMA[b]) = delta_ab
DUAL = {
    "0": np.eye(2, dtype=complex) / 2,
    "+": SIGMA["-"].copy(),
    "-": SIGMA["+"].copy(),
    "3": SIGMA["3"] / 2,
}


def _exact_matrix(rows):
    m = np.empty((len(rows), len(rows[0])), dtype=object)
    for i, row in enumerate(rows):
        for j, x in enumerate(row):
            m[i, j] = x if isinstance(x, GaussianRational) else GaussianRational.of(x)
    return m


SIGMA_EXACT = {
    "0": _exact_matrix([[1, 0], [0, 1]]),
    "+": _exact_matrix([[0, 1], [0, 0]]),
    "-": _exact_matrix([[0, 0], [1, 0]]),
    "3": _exact_matrix([[1, 0], [0, -1]]),
}

DUAL_EXACT = {
    "0": _exact_matrix([[GR_HALF, GR_ZERO], [GR_ZERO, GR_HALF]]),
    "+": SIGMA_EXACT["-"],
    "-": SIGMA_EXACT["+"],
    "3": _exact_matrix([[GR_HALF, GR_ZERO], [GR_ZERO, -GR_HALF]]),
}


def kron(*ops) -> np.ndarray:
    """Tensor product of one or more operators, first factor slowest."""
    if not ops:
        raise ValueError("kron of no factors")
    out = np.asarray(ops[0])
    for op in ops[1:]:
        out = np.kron(out, np.asarray(op))
    return out


def identity(dim: int, like: np.ndarray | None = None) -> np.ndarray:
    """Identity matrix, exact (object ints) when ``like`` has object dtype."""
    if like is not None and like.dtype == object:
        m = np.zeros((dim, dim), dtype=object)
        for i in range(dim):
            m[i, i] = GR_ONE
        return m
    return np.eye(dim, dtype=complex)


def permutation_op() -> np.ndarray:
    """Two-site swap P with P(x ⊗ y) = y ⊗ x and P^2 = 1."""
    p = np.zeros((4, 4), dtype=complex)
    for x in range(2):
        for y in range(2):
            p[2 * y + x, 2 * x + y] = 1.0
    return p


def _check_operator(matrix: np.ndarray) -> int:
    matrix = np.asarray(matrix)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise ValueError(f"operator must be square, got shape {matrix.shape}")
    dim = matrix.shape[0]
    if dim & (dim - 1):
        raise ValueError(f"operator dimension {dim} is not a power of two")
    if matrix.dtype != object and not np.all(np.isfinite(matrix)):
        raise ValueError("operator has non-finite entries")
    return dim


@dataclass
class LocalDensity:
    """Range-r operator on (C^2)^{tensor r}, stored dense."""

    range: int
    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix)
        dim = _check_operator(self.matrix)
        if self.range < 1 or dim != 2**self.range:
            raise ValueError(
                f"range-{self.range} density needs dim {2**self.range}, got {dim}"
            )

    @property
    def dim(self) -> int:
        return 2**self.range

    def copy(self) -> "LocalDensity":
        return LocalDensity(self.range, self.matrix.copy())


def _site_gather(sites: list[int], length: int) -> np.ndarray:
    """Index map g with M[J, I] = E[g(J), g(I)].

    ``sites`` are the 1-based chain positions carrying the density, in slot
    order; E is the density kron-padded on slots 1..r.  g reorders the bits
    of a basis index so the designated sites come first.
    """
    rest = [s for s in range(1, length + 1) if s not in sites]
    order = list(sites) + rest
    idx = np.arange(2**length)
    g = np.zeros_like(idx)
    for slot, site in enumerate(order):
        bit = (idx >> (length - site)) & 1
        g |= bit << (length - 1 - slot)
    return g


def embed_density(
    density: LocalDensity, site: int, length: int, periodic: bool = False
) -> np.ndarray:
    """Place a range-r density at chain sites site..site+r-1.

    Wraps around the chain end when ``periodic``; otherwise placements that
    stick out past site L are an error.
    """
    r = density.range
    if not 1 <= site <= length:
        raise ValueError(f"site {site} outside chain 1..{length}")
    if r > length:
        raise ValueError(f"range {r} exceeds chain length {length}")
    if not periodic and site + r - 1 > length:
        raise ValueError(
            f"placement at site {site} overflows open chain of length {length}"
        )
    sites = [(site - 1 + k) % length + 1 for k in range(r)]
    if length == r:
        big = density.matrix
    else:
        big = kron(density.matrix, identity(2 ** (length - r), like=density.matrix))
    if sites == list(range(1, r + 1)):
        return big
    g = _site_gather(sites, length)
    return big[np.ix_(g, g)]


def periodic_sum(density: LocalDensity, length: int) -> np.ndarray:
    """Sum of the density over all L periodic placements."""
    if length < density.range:
        raise ValueError(f"chain length {length} below density range {density.range}")
    dim = 2**length
    if density.matrix.dtype == object:
        total = np.zeros((dim, dim), dtype=object)
    else:
        total = np.zeros((dim, dim), dtype=complex)
    for n in range(1, length + 1):
        total = total + embed_density(density, n, length, periodic=True)
    return total


def shift_operator(length: int) -> np.ndarray:
    """One-site cyclic shift U with U|b1 b2 .. bL> = |bL b1 .. b(L-1)>.

    This is the direction produced by the transfer matrix at u = 0 for any
    regular R-matrix.
    """
    dim = 2**length
    idx = np.arange(dim)
    shifted = (idx >> 1) | ((idx & 1) << (length - 1))
    u = np.zeros((dim, dim), dtype=complex)
    u[shifted, idx] = 1.0
    return u


def transfer_matrix(r_eval, u: complex, length: int) -> np.ndarray:
    """Transfer matrix t(u) = tr_0 R_{0L}(u) ... R_{01}(u).

    ``r_eval`` is any callable u -> 4x4 complex matrix (an RMatrixFn works).
    For regular R this reduces to the cyclic shift at u = 0.
    """
    if length < 2:
        raise ValueError("transfer matrix needs length >= 2")
    r = np.asarray(r_eval(u), dtype=complex)
    if r.shape != (4, 4):
        raise ValueError(f"R(u) must be 4x4, got {r.shape}")
    r4 = r.reshape(2, 2, 2, 2)  # (aux_out, site_out, aux_in, site_in)
    t = r4
    for _ in range(2, length + 1):
        d = t.shape[1]
        t = np.einsum("asct,cXbY->aXsbYt", r4, t.reshape(2, d, 2, d))
        t = t.reshape(2, 2 * d, 2, 2 * d)
    return np.einsum("aXaY->XY", t)


@dataclass
class PauliCoeffs:
    """Coefficients A[a, b] of a two-site density in the extended Pauli basis.

    Index order follows PAULI_LABELS, so A[1, 2] multiplies sigma^+ x sigma^-.
    """

    A: np.ndarray

    def __post_init__(self):
        self.A = np.asarray(self.A)
        if self.A.shape != (4, 4):
            raise ValueError(f"PauliCoeffs needs a 4x4 array, got {self.A.shape}")

    def __getitem__(self, key):
        a, b = key
        if isinstance(a, str):
            a = PAULI_LABELS.index(a)
        if isinstance(b, str):
            b = PAULI_LABELS.index(b)
        return self.A[a, b]


def decompose_to_pauli(density: LocalDensity) -> PauliCoeffs:
    """Trace-pair a range-2 density against the dual Pauli basis."""
    if density.range != 2:
        raise ValueError("Pauli decomposition is defined for range-2 densities")
    m = density.matrix
    exact = m.dtype == object
    dual = DUAL_EXACT if exact else DUAL
    a = np.empty((4, 4), dtype=object if exact else complex)
    for i, la in enumerate(PAULI_LABELS):
        for j, lb in enumerate(PAULI_LABELS):
            k = kron(dual[la], dual[lb])
            a[i, j] = (k.T * m).sum()
    return PauliCoeffs(a)


def compose_from_pauli(coeffs: PauliCoeffs) -> LocalDensity:
    """Rebuild the range-2 density sum_ab A_ab sigma^a x sigma^b."""
    arr = coeffs.A
    exact = arr.dtype == object
    basis = SIGMA_EXACT if exact else SIGMA
    if exact:
        total = np.zeros((4, 4), dtype=object)
    else:
        total = np.zeros((4, 4), dtype=complex)
    for i, la in enumerate(PAULI_LABELS):
        for j, lb in enumerate(PAULI_LABELS):
            c = arr[i, j]
            if exact or c != 0:
                total = total + c * kron(basis[la], basis[lb])
    return LocalDensity(2, total)


_STRUCTURE: np.ndarray | None = None


def structure_constants() -> np.ndarray:
    """Exact table f[a, b, c] with sigma^a sigma^b = sum_c f[a,b,c] sigma^c."""
    global _STRUCTURE
    if _STRUCTURE is None:
        f = np.empty((4, 4, 4), dtype=object)
        for i, la in enumerate(PAULI_LABELS):
            for j, lb in enumerate(PAULI_LABELS):
                prod = np.dot(SIGMA_EXACT[la], SIGMA_EXACT[lb])
                for k, lc in enumerate(PAULI_LABELS):
                    f[i, j, k] = (DUAL_EXACT[lc].T * prod).sum()
        _STRUCTURE = f
    return _STRUCTURE


def structure_constants_complex() -> np.ndarray:
    f = structure_constants()
    out = np.zeros((4, 4, 4), dtype=complex)
    for idx in np.ndindex(4, 4, 4):
        out[idx] = complex(f[idx])
    return out


# ---------------------------------------------------------------------------
# Pauli-word transforms on n sites (used by the boost machinery)
# ---------------------------------------------------------------------------

_DUAL_T = np.stack([DUAL[l] for l in PAULI_LABELS])  # (a, i, j)
_SIGMA_T = np.stack([SIGMA[l] for l in PAULI_LABELS])


def decompose_words(matrix: np.ndarray, nsites: int) -> np.ndarray:
    """Coefficients c[a1..an] of M = sum c * sigma^{a1} x .. x sigma^{an}."""
    dim = 2**nsites
    m = np.asarray(matrix, dtype=complex).reshape((2,) * (2 * nsites))
    # axes: first n are row bits j_k, last n are column bits i_k of M[J, I]
    out = m
    for k in range(nsites):
        # contract site k: c[.., a] = sum_{i,j} DUAL[a, i, j] M[j.., i..]
        out = np.tensordot(out, _DUAL_T, axes=([0, nsites - k], [2, 1]))
    return out


def compose_words(coeffs: np.ndarray) -> np.ndarray:
    """Inverse of decompose_words."""
    coeffs = np.asarray(coeffs, dtype=complex)
    nsites = coeffs.ndim
    out = coeffs
    for _ in range(nsites):
        # replace leading word axis by a (row bit, column bit) pair at the end
        out = np.tensordot(out, _SIGMA_T, axes=([0], [0]))
    # axes now: (j1, i1, j2, i2, ...) -> want (j1..jn, i1..in)
    perm = list(range(0, 2 * nsites, 2)) + list(range(1, 2 * nsites, 2))
    return out.transpose(perm).reshape(2**nsites, 2**nsites)
