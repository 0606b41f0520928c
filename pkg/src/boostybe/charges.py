"""Conserved-charge towers from a Hamiltonian density via the boost recursion.

The boost of a nearest-neighbour Hamiltonian is the formal sum
``B = sum_a a * H_{a,a+1}``.  Commuting B with a range-r charge density and
re-indexing the site-weighted terms telescopes into a translation-invariant
range-(r+1) density, which is the next charge in the tower.  The telescoping
is performed exactly at the level of Pauli words, so the output density is a
deterministic canonical representative (all words aligned to their leftmost
non-identity site).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .tensor_core import (
    LocalDensity,
    compose_words,
    decompose_words,
    embed_density,
    kron,
    periodic_sum,
)


class TelescopingError(RuntimeError):
    """A site-weighted term survived canonical re-indexing.

    For a Hamiltonian whose charges commute this never happens; it signals
    either an internal bug or a boost applied to a non-integrable density
    beyond the first step.
    """


@dataclass
class FormalTerm:
    """One term ``sum_n (c0 + c1*n) * density_{n+offset, ...}``."""

    weight: tuple[complex, complex]  # (c0, c1)
    density: LocalDensity
    offset: int


@dataclass
class FormalLocalSum:
    """Finite list of site-weighted density placements."""

    terms: list[FormalTerm]

    def reindexed(self) -> "FormalLocalSum":
        """Shift every term so its window starts at the formal origin.

        Substituting n = m + offset sends the weight c0 + c1*m to
        (c0 - c1*offset) + c1*n.
        """
        out = []
        for t in self.terms:
            c0, c1 = t.weight
            out.append(FormalTerm((c0 - c1 * t.offset, c1), t.density, 0))
        return FormalLocalSum(out)

    def weight_matrices(self, window: int) -> tuple[np.ndarray, np.ndarray]:
        """Degree-0 and degree-1 weight totals, padded to a common window."""
        dim = 2**window
        m0 = np.zeros((dim, dim), dtype=complex)
        m1 = np.zeros((dim, dim), dtype=complex)
        for t in self.reindexed().terms:
            pad = window - t.density.range
            if pad < 0:
                raise ValueError("term range exceeds requested window")
            mat = t.density.matrix
            if pad:
                mat = kron(mat, np.eye(2**pad, dtype=complex))
            c0, c1 = t.weight
            if c0:
                m0 += c0 * mat
            if c1:
                m1 += c1 * mat
        return m0, m1


def q3_density(h: LocalDensity) -> LocalDensity:
    """Range-3 charge density [H_{12}, H_{23}] as an 8x8 matrix."""
    if h.range != 2:
        raise ValueError("q3_density needs a range-2 density")
    one = np.eye(2, dtype=complex)
    a = kron(h.matrix, one)
    b = kron(one, h.matrix)
    return LocalDensity(3, a @ b - b @ a)


def boost_commutator_terms(h: LocalDensity, qr: LocalDensity) -> FormalLocalSum:
    """Site-weighted commutator terms of [sum_a a*H_a, sum_m Q_m].

    Only the r+1 overlapping relative placements contribute.  Term k places
    H at sites (m+k, m+k+1) against Q at sites m..m+r-1; each window
    commutator is returned with its literal site weight.
    """
    if h.range != 2:
        raise ValueError("boost density must have range 2")
    r = qr.range
    window = r + 1
    one = np.eye(2, dtype=complex)
    q_left = kron(qr.matrix, one)  # Q on slots 1..r of the window
    q_right = kron(one, qr.matrix)  # Q on slots 2..r+1
    terms = []
    # k = -1: H on the two leftmost slots, Q shifted right; window starts at
    # m-1 so the weight a = m-1 re-indexes to the window origin
    h_emb = kron(h.matrix, np.eye(2 ** (r - 1), dtype=complex))
    c = h_emb @ q_right - q_right @ h_emb
    terms.append(FormalTerm((-1.0, 1.0), LocalDensity(window, c), -1))
    for k in range(r):
        h_emb = kron(
            np.eye(2**k, dtype=complex), h.matrix, np.eye(2 ** (r - 1 - k), dtype=complex)
        )
        c = h_emb @ q_left - q_left @ h_emb
        terms.append(FormalTerm((k, 1.0), LocalDensity(window, c), 0))
    return FormalLocalSum(terms)


def _strip_word(word: tuple[int, ...]) -> tuple[int, tuple[int, ...]]:
    """Remove leading/trailing identity letters; returns (leading count, core)."""
    lead = 0
    for letter in word:
        if letter:
            break
        lead += 1
    else:
        return len(word), ()
    trail = len(word)
    while trail > lead and word[trail - 1] == 0:
        trail -= 1
    return lead, word[lead:trail]


def boost_step(h: LocalDensity, qr: LocalDensity, tol: float = 1e-9) -> LocalDensity:
    """Next charge density from the boost commutator, canonically re-indexed.

    The degree-1 site weights must cancel once every Pauli word is aligned
    to its leftmost non-identity site; the shifts performed during that
    alignment feed back into the degree-0 part (telescoping).  The global
    sign is fixed so that ``boost_step(H, H) == q3_density(H)``.
    """
    window = qr.range + 1
    m0, m1 = boost_commutator_terms(h, qr).weight_matrices(window)
    scale = max(
        1.0,
        float(np.max(np.abs(h.matrix))) * float(np.max(np.abs(qr.matrix))),
    )
    if np.max(np.abs(m1)) > tol * scale:
        words = decompose_words(m1, window)
        c1_total: dict[tuple[int, ...], complex] = {}
        c0_shift: dict[tuple[int, ...], complex] = {}
        for idx in np.ndindex(words.shape):
            gamma = words[idx]
            if gamma == 0:
                continue
            lead, core = _strip_word(idx)
            c1_total[core] = c1_total.get(core, 0.0) + gamma
            if lead:
                c0_shift[core] = c0_shift.get(core, 0.0) - lead * gamma
        residual = max((abs(v) for v in c1_total.values()), default=0.0)
        if residual > tol * scale:
            raise TelescopingError(
                f"degree-1 weight of size {residual:.3e} survives re-indexing; "
                "the boosted charge is not a local operator"
            )
        corrections = np.zeros((4,) * window, dtype=complex)
        for core, c in c0_shift.items():
            if abs(c) <= 1e-300:
                continue
            corrections[core + (0,) * (window - len(core))] += c
        m0 = m0 + compose_words(corrections)
    return LocalDensity(window, -m0)


@dataclass
class ChargeTower:
    """Hamiltonian plus the boosted densities Q_2 .. Q_rmax."""

    hamiltonian: LocalDensity
    densities: dict[int, LocalDensity]

    def __getitem__(self, r: int) -> LocalDensity:
        return self.densities[r]

    @property
    def r_max(self) -> int:
        return max(self.densities)


def charge_tower(h: LocalDensity, r_max: int = 6) -> ChargeTower:
    """Iterate the boost recursion up to range ``r_max``."""
    if not 2 <= r_max <= 6:
        raise ValueError("r_max must lie in 2..6")
    if h.range != 2:
        raise ValueError("charge_tower needs a range-2 Hamiltonian density")
    densities = {2: h}
    for r in range(2, r_max):
        densities[r + 1] = boost_step(h, densities[r])
    return ChargeTower(h, densities)


def verify_commutation(
    tower: ChargeTower, pairs: list[tuple[int, int]], length: int
) -> list[float]:
    """Relative Frobenius residuals of [Q_r, Q_s] on a periodic chain."""
    residuals = []
    for r, s in pairs:
        if length < r + s:
            raise ValueError(
                f"chain length {length} too small for commutator ({r},{s}); "
                "wrapped densities would overlap"
            )
        qr = periodic_sum(tower[r], length)
        qs = periodic_sum(tower[s], length)
        comm = qr @ qs - qs @ qr
        norm = max(
            1.0,
            float(np.linalg.norm(tower[r].matrix) * np.linalg.norm(tower[s].matrix)),
        )
        residuals.append(float(np.linalg.norm(comm)) / norm)
    return residuals
