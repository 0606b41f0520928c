"""Yang-Baxter verification and perturbative solving.

Residual conventions: the Yang-Baxter defect is measured in the max-entry
norm on the three-site space; regularity, unitarity and extraction errors
are Frobenius.  Sample points (u, v) are drawn uniformly from a complex
bidisk (default radius 0.5) with deterministic seeding, rejecting points
near the evaluator's singularities.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb

import numpy as np

from .catalog import RMatrixFn
from .tensor_core import LocalDensity, kron, permutation_op

_I2 = np.eye(2, dtype=complex)
_P = permutation_op()
_P1 = kron(_P, _I2)


def _as_eval(r):
    return r if callable(r) else r.fn


def embed_12(m: np.ndarray) -> np.ndarray:
    return kron(m, _I2)


def embed_23(m: np.ndarray) -> np.ndarray:
    return kron(_I2, m)


def embed_13(m: np.ndarray) -> np.ndarray:
    return _P1 @ kron(_I2, m) @ _P1


def ybe_residual(r, u: complex, v: complex) -> float:
    """Max-entry norm of R12(u-v) R13(u) R23(v) - R23(v) R13(u) R12(u-v)."""
    r = _as_eval(r)
    r12 = embed_12(np.asarray(r(u - v), dtype=complex))
    r13 = embed_13(np.asarray(r(u), dtype=complex))
    r23 = embed_23(np.asarray(r(v), dtype=complex))
    return float(np.max(np.abs(r12 @ r13 @ r23 - r23 @ r13 @ r12)))


def regularity_check(r) -> float:
    """Frobenius distance of R(0) from the permutation operator."""
    r = _as_eval(r)
    return float(np.linalg.norm(np.asarray(r(0.0), dtype=complex) - _P))


def sample_uv(
    count: int,
    radius: float = 0.5,
    seed: int = 0,
    singular_points: tuple[complex, ...] = (),
    margin: float = 0.05,
) -> list[tuple[complex, complex]]:
    """Deterministic (u, v) draws from the bidisk, avoiding singularities."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        u, v = (
            radius * np.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())
            for _ in range(2)
        )
        pts = (u, v, u - v, -u, -v)
        if any(abs(p - s) < margin for p in pts for s in singular_points):
            continue
        out.append((complex(u), complex(v)))
    return out


def braiding_unitarity_check(r, samples=20, radius: float = 0.5, seed: int = 0) -> float:
    """max_u min_c || R(u) P R(-u) P - c 1 || over sampled u."""
    r_eval = _as_eval(r)
    if isinstance(samples, int):
        singular = r.singular_points if isinstance(r, RMatrixFn) else ()
        samples = [u for u, _ in sample_uv(samples, radius, seed, singular)]
    worst = 0.0
    for u in samples:
        m = r_eval(u) @ _P @ r_eval(-u) @ _P
        c = np.trace(m) / 4.0
        worst = max(worst, float(np.linalg.norm(m - c * np.eye(4))))
    return worst


def extract_hamiltonian(r, step: float = 1e-3, with_error: bool = False):
    """Hamiltonian density P R'(0) by Richardson-extrapolated differences."""
    reg = regularity_check(r)
    if reg > 1e-8:
        raise ValueError(f"R is not regular: |R(0) - P| = {reg:.3e}")
    r_eval = _as_eval(r)

    def central(h):
        f = lambda x: np.asarray(r_eval(x), dtype=complex)
        return (8 * (f(h) - f(-h)) - (f(2 * h) - f(-2 * h))) / (12 * h)

    d1 = central(step)
    d2 = central(step / 2)
    deriv = (16 * d2 - d1) / 15
    h = LocalDensity(2, _P @ deriv)
    if with_error:
        return h, float(np.linalg.norm(deriv - d2))
    return h


# ---------------------------------------------------------------------------
# Perturbative series solution of the Yang-Baxter equation
# ---------------------------------------------------------------------------


@dataclass
class SeriesSolution:
    """Truncated power series R(u) = sum_n R^(n) u^n solving the YBE.

    R^(0) is the permutation and R^(1) = P H; higher coefficients are solved
    order by order.  ``obstruction`` records the first order whose linear
    system was inconsistent (a non-integrable Hamiltonian); coefficients
    then stop at the previous order.
    """

    h: LocalDensity
    order: int
    coefficients: list[np.ndarray]
    gauge: str = "least-norm, R^(n) orthogonal to P for n >= 2"
    obstruction: int | None = None
    linear_residuals: list[float] = field(default_factory=list)

    def evaluate(self, u: complex) -> np.ndarray:
        out = np.zeros((4, 4), dtype=complex)
        for n, c in enumerate(self.coefficients):
            out += c * u**n
        return out


def series_solve(h: LocalDensity, order: int, tol: float = 1e-8) -> SeriesSolution:
    """Solve the YBE perturbatively from a Hamiltonian density.

    At each total order n the unknown coefficient enters the collected
    (u, v) bi-degree equations linearly; the stacked system is solved by
    least norm and the pure-gauge direction along P is projected out.
    """
    if h.range != 2:
        raise ValueError("series_solve needs a range-2 Hamiltonian density")
    if order > 8:
        raise ValueError("series order capped at 8")
    coeffs = [_P.copy(), _P @ h.matrix]
    if order == 0:
        return SeriesSolution(h, 0, coeffs[:1])
    residuals: list[float] = []
    obstruction = None

    def collected(n, cs):
        """All bi-degree matrices E(i, j), i + j = n, for coefficients cs."""
        out = [np.zeros((8, 8), dtype=complex) for _ in range(n + 1)]
        for k1 in range(min(n, len(cs) - 1) + 1):
            r12 = embed_12(cs[k1])
            for k2 in range(n - k1 + 1):
                k3 = n - k1 - k2
                if k2 >= len(cs) or k3 >= len(cs):
                    continue
                r13 = embed_13(cs[k2])
                r23 = embed_23(cs[k3])
                term = r12 @ r13 @ r23 - r23 @ r13 @ r12
                for a in range(k1 + 1):
                    i = k2 + a
                    sign = -1 if (k1 - a) % 2 else 1
                    out[i] += (comb(k1, a) * sign) * term
        return out

    for n in range(2, order + 1):
        base_vec = np.concatenate(
            [e.ravel() for e in collected(n, coeffs + [np.zeros((4, 4), dtype=complex)])]
        )
        cols = []
        for idx in range(16):
            basis = np.zeros((4, 4), dtype=complex)
            basis.flat[idx] = 1.0
            probe = collected(n, coeffs + [basis])
            cols.append(np.concatenate([e.ravel() for e in probe]) - base_vec)
        a = np.stack(cols, axis=1)
        rhs = -base_vec
        x, *_ = np.linalg.lstsq(a, rhs, rcond=None)
        resid = float(np.max(np.abs(a @ x - rhs)))
        residuals.append(resid)
        if resid > tol:
            obstruction = n
            break
        rn = x.reshape(4, 4)
        # remove the scalar gauge direction f_n * P
        rn = rn - (np.vdot(_P, rn) / np.vdot(_P, _P)) * _P
        coeffs.append(rn)
    return SeriesSolution(h, order, coeffs, obstruction=obstruction, linear_residuals=residuals)


def series_to_rmatrix(sol: SeriesSolution, family: str | None = None) -> RMatrixFn:
    """Wrap a truncated series as an evaluator with 'series' provenance."""
    return RMatrixFn(
        family,
        {},
        sol.evaluate,
        (),
        "series",
        {"order": len(sol.coefficients) - 1, "obstruction": sol.obstruction},
    )


@dataclass
class ChFit:
    """Per-order projection of P R^(n) onto span{1, H, H^2, H^3}."""

    coefficients: list[np.ndarray]  # each length-4 complex vector
    residuals: list[float]

    def f_function(self, j: int, u: complex) -> complex:
        """Partial sum of f_j(u) = sum_n c_j^(n) u^(n-j)."""
        total = 0j
        for n, c in enumerate(self.coefficients):
            if n >= j:
                total += c[j] * u ** (n - j)
        return total


def ch_fit(sol: SeriesSolution) -> ChFit:
    """Least-squares Cayley-Hamilton fit of every series coefficient.

    The fit runs in the numerically independent Krylov sub-basis
    {1, H, .., H^d}; coefficients of dependent higher powers are reported
    as zero, which keeps the fit deterministic when H has degenerate
    eigenvalues.  A nonzero residual means the coefficient leaves the span,
    which is information rather than an error.
    """
    hm = sol.h.matrix
    powers = [np.eye(4, dtype=complex), hm, hm @ hm, hm @ hm @ hm]
    full = np.stack([p.ravel() for p in powers], axis=1)
    rank = 1
    for k in range(2, 5):
        sv = np.linalg.svd(full[:, :k], compute_uv=False)
        if sv[-1] <= 1e-10 * sv[0]:
            break
        rank = k
    basis = full[:, :rank]
    coeffs, residuals = [], []
    for rn in sol.coefficients:
        y = (_P @ rn).ravel()
        c_red, *_ = np.linalg.lstsq(basis, y, rcond=None)
        c = np.zeros(4, dtype=complex)
        c[:rank] = c_red
        coeffs.append(c)
        residuals.append(float(np.linalg.norm(basis @ c_red - y)))
    return ChFit(coeffs, residuals)


def taylor_coefficients(r, order: int, radius: float = 0.1, samples: int = 64) -> list[np.ndarray]:
    """Numeric Taylor coefficients of an analytic evaluator at 0 (Cauchy/FFT)."""
    r = _as_eval(r)
    vals = np.stack(
        [
            np.asarray(r(radius * np.exp(2j * np.pi * k / samples)), dtype=complex)
            for k in range(samples)
        ]
    )
    hat = np.fft.fft(vals, axis=0) / samples
    return [hat[m] / radius**m for m in range(order + 1)]


def gauge_match(sol: SeriesSolution, r, order: int) -> tuple[np.ndarray, float]:
    """Scalar series g with g(0)=1 matching the solution to a reference R.

    Returns the coefficients of g and the largest Frobenius mismatch of
    A^(n) - [g B]^(n) over n <= order; a small mismatch certifies that the
    two are the same R-matrix up to normalization.
    """
    order = min(order, len(sol.coefficients) - 1)
    b = taylor_coefficients(r, order)
    g = np.zeros(order + 1, dtype=complex)
    g[0] = 1.0
    mismatch = 0.0
    b0 = b[0].ravel()
    for n in range(1, order + 1):
        target = sol.coefficients[n] - sum(g[k] * b[n - k] for k in range(n))
        g[n] = np.vdot(b0, target.ravel()) / np.vdot(b0, b0)
        mismatch = max(mismatch, float(np.linalg.norm(target - g[n] * b[0])))
    return g, mismatch


@dataclass
class YbeReport:
    """Bundle of verification errors for one model."""

    family: str | None
    params: dict[str, complex]
    provenance: str
    sample_points: list[tuple[complex, complex]]
    max_residual: float
    regularity_error: float
    unitarity_error: float
    extracted_h_error: float

    def all_errors(self) -> dict[str, float]:
        return {
            "ybe_residual": self.max_residual,
            "regularity": self.regularity_error,
            "braiding_unitarity": self.unitarity_error,
            "hamiltonian_extraction": self.extracted_h_error,
        }


def verify_rmatrix(
    r: RMatrixFn,
    reference_h: LocalDensity | None = None,
    samples: int = 20,
    radius: float = 0.5,
    seed: int = 0,
) -> YbeReport:
    """Run the full residual battery against an evaluator."""
    pts = sample_uv(samples, radius, seed, r.singular_points)
    worst = max(ybe_residual(r, u, v) for u, v in pts) if pts else 0.0
    reg = regularity_check(r)
    uni = braiding_unitarity_check(r, [u for u, _ in pts])
    if reference_h is not None:
        ext = float(np.linalg.norm(extract_hamiltonian(r).matrix - reference_h.matrix))
    else:
        ext = 0.0
    return YbeReport(
        r.family, dict(r.params), r.provenance, pts, worst, reg, uni, ext
    )
