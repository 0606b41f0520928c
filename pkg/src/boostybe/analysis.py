"""Spectral diagnostics: Jordan structure, nilpotency, eigenvalue matching.

Characteristic polynomials are computed by the Faddeev-LeVerrier trace
recursion rather than from eigenvalues, since several of the densities
involved are defective and their numerically computed eigenvalues carry
errors of order eps^(1/k) for a size-k Jordan block.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import catalog as _catalog
from .tensor_core import LocalDensity, SIGMA, kron, periodic_sum, permutation_op


def charpoly_coefficients(m: np.ndarray) -> np.ndarray:
    """Monic characteristic polynomial coefficients [1, c1, ..., cn]."""
    m = np.asarray(m, dtype=complex)
    n = m.shape[0]
    coeffs = np.zeros(n + 1, dtype=complex)
    coeffs[0] = 1.0
    acc = np.zeros_like(m)
    for k in range(1, n + 1):
        acc = m @ (acc + coeffs[k - 1] * np.eye(n))
        coeffs[k] = -np.trace(acc) / k
    return coeffs


def _rank(m: np.ndarray, tol: float) -> int:
    sv = np.linalg.svd(m, compute_uv=False)
    if sv.size == 0 or sv[0] == 0:
        return 0
    return int(np.sum(sv > tol * sv[0]))


def _eigvals_robust(m: np.ndarray) -> np.ndarray:
    """Eigenvalues with a fallback for LAPACK non-convergence.

    Conjugating by a random diagonal matrix is an exact similarity, so a
    retry on the balanced conjugate returns the same spectrum while moving
    the QR iteration away from its stagnation point.
    """
    rng = np.random.default_rng(12345)
    mat = np.asarray(m, dtype=complex)
    for attempt in range(4):
        try:
            return np.linalg.eigvals(mat)
        except np.linalg.LinAlgError:
            d = rng.uniform(0.5, 2.0, size=mat.shape[0])
            mat = (mat * d[None, :]) / d[:, None]
    import scipy.linalg

    return scipy.linalg.eigvals(np.asarray(m, dtype=complex))


@dataclass
class JordanProfile:
    """Clustered eigenvalues with multiplicities and largest block sizes."""

    eigenvalues: list[dict]
    tol: float
    warning: str | None = None

    @property
    def diagonalizable(self) -> bool:
        return all(e["largest_block"] == 1 for e in self.eigenvalues)

    def largest_block(self) -> int:
        return max(e["largest_block"] for e in self.eigenvalues)


def jordan_profile(m: np.ndarray, tol: float = 1e-8) -> JordanProfile:
    """Numerical Jordan structure of a square matrix.

    Eigenvalues are clustered within an absolute distance scaled by the
    spectral size; geometric multiplicities come from SVD ranks of
    (M - lambda), block sizes from the rank sequence of its powers.
    Ill-separated clusters are reported in the warning field.
    """
    m = np.asarray(m, dtype=complex)
    n = m.shape[0]
    if m.shape != (n, n):
        raise ValueError("jordan_profile needs a square matrix")
    eigs = _eigvals_robust(m)
    scale = max(1.0, float(np.max(np.abs(eigs))))
    cluster_tol = tol * scale
    order = np.lexsort((eigs.imag, eigs.real))
    clusters: list[list[complex]] = []
    for lam in eigs[order]:
        for cl in clusters:
            if abs(lam - np.mean(cl)) <= cluster_tol:
                cl.append(lam)
                break
        else:
            clusters.append([lam])
    warning = None
    centers = [np.mean(cl) for cl in clusters]
    for i in range(len(centers)):
        for j in range(i + 1, len(centers)):
            if abs(centers[i] - centers[j]) < 10 * cluster_tol:
                warning = (
                    "eigenvalue clusters separated by less than 10x the "
                    "clustering tolerance; multiplicities may be unreliable"
                )
    records = []
    for cl in clusters:
        lam = complex(np.mean(cl))
        alg = len(cl)
        shifted = m - lam * np.eye(n)
        ranks = [n]
        power = np.eye(n, dtype=complex)
        largest = 0
        for k in range(1, alg + 1):
            power = power @ shifted
            # normalize to keep the SVD threshold meaningful for high powers
            nrm = np.linalg.norm(power)
            ranks.append(_rank(power, tol) if nrm > 0 else 0)
            if ranks[-1] == ranks[-2]:
                break
            largest = k
        geo = n - ranks[1]
        if largest == 0:
            largest = 1 if alg else 0
        records.append(
            {
                "value": lam,
                "algebraic": alg,
                "geometric": geo,
                "largest_block": largest,
            }
        )
    return JordanProfile(records, tol, warning)


def nilpotency_index(
    m: np.ndarray, tol: float = 1e-10, k_max: int | None = None
) -> int | None:
    """Smallest k with M^k numerically zero, or None if not nilpotent.

    Cross-checked against the spectral radius: a matrix whose eigenvalues
    do not all vanish is reported non-nilpotent regardless of power decay.
    """
    m = np.asarray(m, dtype=complex)
    n = m.shape[0]
    if k_max is None:
        k_max = n
    if k_max < 1:
        raise ValueError("k_max must be at least 1")
    norm = float(np.max(np.abs(m)))
    if norm == 0.0:
        return 1
    radius = float(np.max(np.abs(_eigvals_robust(m))))
    if radius > max(tol, 1e-8) * max(1.0, norm):
        return None
    power = np.eye(n, dtype=complex)
    for k in range(1, k_max + 1):
        power = power @ m
        if float(np.max(np.abs(power))) < tol * max(1.0, norm) ** k:
            return k
    return None


# ---------------------------------------------------------------------------
# Diagonalizability conditions for the four non-nilpotent classes
# ---------------------------------------------------------------------------

# residual of the condition; the chain operator (periodic sum, L >= 3) is
# diagonalizable exactly on the zero locus.  At L = 2 the defect direction
# of C3 and C5 cancels, and the C3/C5 densities themselves are too small to
# see it (the C3 density is diagonalizable for every parameter value).
DIAGONALIZABILITY_CONDITIONS = {
    "C3": ("a3 = 0", lambda v: abs(v["a3"])),
    "C4": (
        "a2 + a4 = 0 and a1*a3 + a2*a4 = 0",
        lambda v: max(abs(v["a2"] + v["a4"]), abs(v["a1"] * v["a3"] + v["a2"] * v["a4"])),
    ),
    "C5": ("a2 + a3 = 0", lambda v: abs(v["a2"] + v["a3"])),
    "C6": ("a2 = 0", lambda v: abs(v["a2"])),
}


def diagonalizable_on_chain(family: str, params, length: int = 3, tol: float = 1e-7) -> bool:
    """Whether the periodic chain operator of the family is diagonalizable."""
    q = periodic_sum(_catalog.hamiltonian(family, params), length)
    return jordan_profile(q, tol=tol).diagonalizable


def satisfies_diagonalizability_condition(family: str, params) -> bool:
    if family not in DIAGONALIZABILITY_CONDITIONS:
        raise ValueError(f"no diagonalizability condition recorded for {family}")
    values = _catalog._as_param_dict(family, params)
    _, residual = DIAGONALIZABILITY_CONDITIONS[family]
    return residual(values) < 1e-10


# ---------------------------------------------------------------------------
# Eigenvalue equivalence with the two reference chains
# ---------------------------------------------------------------------------

REFERENCES = ("SzSz", "OneMinus2P")
_PAIRING = {"C3": "SzSz", "C4": "SzSz", "C5": "OneMinus2P", "C6": "OneMinus2P"}


def reference_density(name: str) -> LocalDensity:
    if name == "SzSz":
        # S^z x S^z with spin-1/2 operators
        return LocalDensity(2, kron(SIGMA["3"], SIGMA["3"]) / 4)
    if name == "OneMinus2P":
        return LocalDensity(2, np.eye(4, dtype=complex) - 2 * permutation_op())
    raise ValueError(f"unknown reference {name!r}; pick from {REFERENCES}")


def fit_reference_scaling(
    family: str, params, reference: str
) -> tuple[complex, complex]:
    """Affine map (s, c) with Q2_family ~ s Q2_ref + c L 1, fitted at L = 2.

    The fit matches the first two spectral moments and resolves the sign of
    s by comparing sorted spectra; it is a derived normalization, not a
    value from the underlying construction.
    """
    h = _catalog.hamiltonian(family, params)
    ref = reference_density(reference)
    qf = periodic_sum(h, 2)
    qr = periodic_sum(ref, 2)
    ef = np.sort_complex(np.linalg.eigvals(qf))
    er = np.sort_complex(np.linalg.eigvals(qr))
    mf, mr = ef.mean(), er.mean()
    vf = ((ef - mf) ** 2).mean()
    vr = ((er - mr) ** 2).mean()
    if abs(vr) < 1e-14:
        raise ValueError("reference spectrum at L=2 has no spread")
    s = np.sqrt(vf / vr)
    best = None
    for sign in (1, -1):
        cand_s = sign * s
        cand_c = (mf - cand_s * mr) / 2
        model = np.sort_complex(
            np.linalg.eigvals(cand_s * qr + cand_c * 2 * np.eye(qr.shape[0]))
        )
        dev = float(np.max(np.abs(ef - model)))
        if best is None or dev < best[2]:
            best = (complex(cand_s), complex(cand_c), dev)
    return best[0], best[1]


def eigenvalue_equivalence(
    family: str, params, length: int, reference: str
) -> float:
    """Max deviation of characteristic-polynomial coefficients between the
    family chain and the affinely matched reference chain.

    Both operators are rescaled by a common factor before the coefficient
    recursion so that float noise stays below the comparison tolerance
    uniformly in the parameter scale (the underlying equality is
    scale-covariant).
    """
    if _PAIRING.get(family) != reference:
        raise ValueError(
            f"unsupported pairing {family} vs {reference}; "
            f"supported: {_PAIRING}"
        )
    if length > 8:
        raise ValueError("length capped at 8")
    s, c = fit_reference_scaling(family, params, reference)
    h = _catalog.hamiltonian(family, params)
    ref = reference_density(reference)
    qf = periodic_sum(h, length)
    qr = s * periodic_sum(ref, length) + c * length * np.eye(2**length)
    sigma = max(1.0, float(np.linalg.norm(qf, np.inf)))
    dev = np.abs(
        charpoly_coefficients(qf / sigma) - charpoly_coefficients(qr / sigma)
    )
    return float(np.max(dev))
