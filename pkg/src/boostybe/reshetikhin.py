"""Exact polynomial system equivalent to [Q2, Q3] = 0 in the Pauli coefficients.

The Hamiltonian density is written as H = A_ab sigma^a x sigma^b over the
sixteen formal variables A_ab.  Commuting the resulting Q2 with the boosted
Q3 and collecting Pauli words yields a coefficient tensor B; grouping its
components by how identity letters on the outside shift the summation index
gives 121 cubic equations (81 bulk, 27 + 9 + 3 boundary combinations, 1
trivially zero).  All construction is exact over Gaussian rationals.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import catalog as _catalog
from .exact import GaussianRational, Poly
from .tensor_core import (
    DUAL_EXACT,
    PAULI_LABELS,
    PauliCoeffs,
    kron,
    structure_constants,
)

NVARS = 16


def var_index(a: int, b: int) -> int:
    return 4 * a + b


def var_name(v: int) -> str:
    return f"A[{PAULI_LABELS[v // 4]}{PAULI_LABELS[v % 4]}]"


VAR_NAMES = [var_name(v) for v in range(NVARS)]


def generic_coeffs() -> np.ndarray:
    """4x4 object array of the sixteen formal variables A_ab."""
    a = np.empty((4, 4), dtype=object)
    for i in range(4):
        for j in range(4):
            a[i, j] = Poly.variable(var_index(i, j), NVARS)
    return a


def _f_sparse():
    """Structure constants as {(a, b): [(c, coeff), ...]} with exact entries."""
    f = structure_constants()
    table = {}
    for a in range(4):
        for b in range(4):
            entries = [(c, f[a, b, c]) for c in range(4) if f[a, b, c]]
            table[(a, b)] = entries
    return table


_F = None


def _f_table():
    global _F
    if _F is None:
        _F = _f_sparse()
    return _F


def symbolic_q3(coeffs: np.ndarray | None = None) -> np.ndarray:
    """Range-3 coefficients A_xyz of [H_12, H_23] as a (4,4,4) array.

    Entries are degree-2 polynomials when ``coeffs`` holds polynomials (its
    default is the sixteen generic variables); any commutative ring works.
    """
    if coeffs is None:
        coeffs = generic_coeffs()
    if isinstance(coeffs, PauliCoeffs):
        coeffs = coeffs.A
    f = _f_table()
    exact = coeffs.dtype == object
    out = np.empty((4, 4, 4), dtype=object)
    zero = Poly.zero(NVARS) if exact and isinstance(coeffs[0, 0], Poly) else 0
    for idx in np.ndindex(4, 4, 4):
        out[idx] = zero
    for x in range(4):
        for b in range(4):
            axb = coeffs[x, b]
            for c in range(4):
                for z in range(4):
                    acz = coeffs[c, z]
                    prod = None
                    for y, val in f[(b, c)]:
                        if prod is None:
                            prod = axb * acz
                        out[x, y, z] = out[x, y, z] + _scale(val, prod, exact)
                    for y, val in f[(c, b)]:
                        if prod is None:
                            prod = axb * acz
                        out[x, y, z] = out[x, y, z] - _scale(val, prod, exact)
    return out


def _scale(gr: GaussianRational, value, exact: bool):
    if exact:
        return gr * value
    return complex(gr) * value


def commutator_tensor(coeffs: np.ndarray | None = None) -> np.ndarray:
    """The (4,4,4,4) word-coefficient tensor B of [Q2, Q3].

    The four overlapping placements of the two densities are aligned at
    their leftmost sites; three-site contributions carry a trailing
    identity letter.
    """
    if coeffs is None:
        coeffs = generic_coeffs()
    if isinstance(coeffs, PauliCoeffs):
        coeffs = coeffs.A
    a3 = symbolic_q3(coeffs)
    f = _f_table()
    exact = coeffs.dtype == object
    zero = Poly.zero(NVARS) if exact and isinstance(coeffs[0, 0], Poly) else 0
    b_out = np.empty((4, 4, 4, 4), dtype=object)
    for idx in np.ndindex(4, 4, 4, 4):
        b_out[idx] = zero

    for a in range(4):
        for b in range(4):
            hab = coeffs[a, b]
            for c in range(4):
                for d in range(4):
                    for e in range(4):
                        q = a3[c, d, e]
                        if isinstance(q, Poly) and q.is_zero:
                            continue
                        if not isinstance(q, Poly) and q == 0:
                            continue
                        prod = hab * q
                        # H one site right of Q3: words (c, d, [a e], b)
                        for y, v1 in f[(a, e)]:
                            b_out[c, d, y, b] = b_out[c, d, y, b] + _scale(v1, prod, exact)
                        for y, v1 in f[(e, a)]:
                            b_out[c, d, y, b] = b_out[c, d, y, b] - _scale(v1, prod, exact)
                        # H on Q3's last two sites: words (c, [a d], [b e], 0)
                        for y, v1 in f[(a, d)]:
                            for z, v2 in f[(b, e)]:
                                b_out[c, y, z, 0] = b_out[c, y, z, 0] + _scale(
                                    v1 * v2, prod, exact
                                )
                        for y, v1 in f[(d, a)]:
                            for z, v2 in f[(e, b)]:
                                b_out[c, y, z, 0] = b_out[c, y, z, 0] - _scale(
                                    v1 * v2, prod, exact
                                )
                        # H on Q3's first two sites: words ([a c], [b d], e, 0)
                        for x, v1 in f[(a, c)]:
                            for y, v2 in f[(b, d)]:
                                b_out[x, y, e, 0] = b_out[x, y, e, 0] + _scale(
                                    v1 * v2, prod, exact
                                )
                        for x, v1 in f[(c, a)]:
                            for y, v2 in f[(d, b)]:
                                b_out[x, y, e, 0] = b_out[x, y, e, 0] - _scale(
                                    v1 * v2, prod, exact
                                )
                        # H one site left of Q3: words (a, [b c], d, e)
                        for y, v1 in f[(b, c)]:
                            b_out[a, y, d, e] = b_out[a, y, d, e] + _scale(v1, prod, exact)
                        for y, v1 in f[(c, b)]:
                            b_out[a, y, d, e] = b_out[a, y, d, e] - _scale(v1, prod, exact)
    return b_out


@dataclass
class EquationSystem:
    """Grouped cubic equations; identically-zero members stay in the count."""

    equations: list[tuple[str, Poly]]
    group_sizes: dict[str, int]
    _compiled: tuple | None = field(default=None, repr=False, compare=False)

    @property
    def nontrivial(self) -> list[tuple[str, Poly]]:
        return [(label, p) for label, p in self.equations if not p.is_zero]

    def compiled(self):
        """Stacked (coefficients, exponents, row-index) arrays for evaluation."""
        if self._compiled is None:
            coeff, exps, rows = [], [], []
            for row, (_, p) in enumerate(self.nontrivial):
                for e, c in p.terms.items():
                    coeff.append(complex(c))
                    exps.append(e)
                    rows.append(row)
            self._compiled = (
                np.asarray(coeff, dtype=complex),
                np.asarray(exps, dtype=np.int64),
                np.asarray(rows, dtype=np.int64),
                len(self.nontrivial),
            )
        return self._compiled


_SYSTEM: EquationSystem | None = None

_NONZERO = (1, 2, 3)


def commutator_system() -> EquationSystem:
    """The 121-equation system whose vanishing is [Q2, Q3] = 0.

    Words with identity letters on the outside re-align under the summation
    index shift, so their coefficients combine; the grouped counts are
    81 + 27 + 9 + 3 + 1.
    """
    global _SYSTEM
    if _SYSTEM is not None:
        return _SYSTEM
    b = commutator_tensor()
    lab = PAULI_LABELS
    eqs: list[tuple[str, Poly]] = []
    for i in _NONZERO:
        for j in _NONZERO:
            for k in _NONZERO:
                for l in _NONZERO:
                    eqs.append((f"bulk:{lab[i]}{lab[j]}{lab[k]}{lab[l]}", b[i, j, k, l]))
    for i in _NONZERO:
        for j in _NONZERO:
            for k in _NONZERO:
                eqs.append(
                    (f"boundary3:{lab[i]}{lab[j]}{lab[k]}", b[i, j, k, 0] + b[0, i, j, k])
                )
    for i in _NONZERO:
        for j in _NONZERO:
            eqs.append(
                (f"boundary2:{lab[i]}{lab[j]}", b[i, j, 0, 0] + b[0, i, j, 0] + b[0, 0, i, j])
            )
    for i in _NONZERO:
        eqs.append(
            (
                f"boundary1:{lab[i]}",
                b[i, 0, 0, 0] + b[0, i, 0, 0] + b[0, 0, i, 0] + b[0, 0, 0, i],
            )
        )
    eqs.append(("trivial:0000", b[0, 0, 0, 0]))
    _SYSTEM = EquationSystem(
        eqs, {"bulk": 81, "boundary3": 27, "boundary2": 9, "boundary1": 3, "trivial": 1}
    )
    return _SYSTEM


def residual_classes_outside_grouping() -> list[tuple[tuple[int, ...], Poly]]:
    """Class sums for stripped words not covered by the 121 grouped equations.

    These involve identity letters in the interior.  Nine of them are
    nonzero polynomials: the grouped system is necessary but not sufficient
    for [Q2, Q3] = 0 with the canonical range-3 density [H12, H23], so the
    numeric solver targets the full class system instead.
    """
    b = commutator_tensor()
    classes: dict[tuple[int, ...], Poly] = {}
    covered = set()
    for i in _NONZERO:
        covered.add((i,))
        for j in _NONZERO:
            covered.add((i, j))
            for k in _NONZERO:
                covered.add((i, j, k))
                for l in _NONZERO:
                    covered.add((i, j, k, l))
    covered.add(())
    for idx in np.ndindex(4, 4, 4, 4):
        word = tuple(idx)
        lead = 0
        while lead < 4 and word[lead] == 0:
            lead += 1
        core = word[lead:]
        while core and core[-1] == 0:
            core = core[:-1]
        if core in covered:
            continue
        classes[core] = classes.get(core, Poly.zero(NVARS)) + b[idx]
    return sorted(classes.items())


_FULL_SYSTEM: EquationSystem | None = None


def full_class_system() -> EquationSystem:
    """Grouped equations plus the interior-identity word classes.

    Vanishing of every stripped word class is exactly [Q2, Q3] = 0; the
    interior classes contribute nine further nontrivial cubics on top of
    the 121 grouped ones.
    """
    global _FULL_SYSTEM
    if _FULL_SYSTEM is None:
        base = commutator_system()
        eqs = list(base.equations)
        sizes = dict(base.group_sizes)
        count = 0
        for word, p in residual_classes_outside_grouping():
            if p.is_zero:
                continue
            label = "interior:" + "".join(PAULI_LABELS[l] for l in word)
            eqs.append((label, p))
            count += 1
        sizes["interior"] = count
        _FULL_SYSTEM = EquationSystem(eqs, sizes)
    return _FULL_SYSTEM


def evaluate_system(system: EquationSystem, coeffs) -> float:
    """Max modulus over equations at a numeric coefficient point."""
    a = _as_vector(coeffs)
    c, e, rows, n = system.compiled()
    mono = c * np.prod(a[None, :] ** e, axis=1)
    vals = np.zeros(n, dtype=complex)
    np.add.at(vals, rows, mono)
    return float(np.max(np.abs(vals))) if n else 0.0


def _as_vector(coeffs) -> np.ndarray:
    if isinstance(coeffs, PauliCoeffs):
        coeffs = coeffs.A
    a = np.asarray(coeffs, dtype=complex)
    if a.shape == (4, 4):
        a = a.ravel()
    if a.shape != (16,):
        raise ValueError("expected 4x4 Pauli coefficients")
    return a


def _system_values_jacobian(system: EquationSystem, a: np.ndarray):
    c, e, rows, n = system.compiled()
    powers = a[None, :] ** e
    mono = c * np.prod(powers, axis=1)
    vals = np.zeros(n, dtype=complex)
    np.add.at(vals, rows, mono)
    jac = np.zeros((n, 16), dtype=complex)
    for v in range(16):
        ev = e[:, v]
        mask = ev > 0
        if not np.any(mask):
            continue
        if a[v] != 0:
            dm = mono[mask] * ev[mask] / a[v]
        else:
            # d(A^k)/dA at A = 0 vanishes except for k = 1
            pw = powers[mask].copy()
            pw[:, v] = 1.0
            dm = c[mask] * np.prod(pw, axis=1) * (ev[mask] == 1)
        col = np.zeros(n, dtype=complex)
        np.add.at(col, rows[mask], dm)
        jac[:, v] = col
    return vals, jac


def numeric_search(
    seeds,
    tolerance: float = 1e-10,
    seed: int = 0,
    max_iter: int = 200,
    system: EquationSystem | None = None,
) -> list[PauliCoeffs]:
    """Damped Newton iteration on the nontrivial equations.

    ``seeds`` is either a count of random complex starts or an explicit list
    of starting coefficient arrays.  Random starts pin A_00 = 0 and unit
    norm to cut down the solution continuum; an explicit start that already
    meets the tolerance is returned unchanged.  No deduplication happens
    here.  The default target is the full class system, so every hit is a
    genuine root of [Q2, Q3] = 0 rather than of the grouped subset only.
    """
    if system is None:
        system = full_class_system()
    rng = np.random.default_rng(seed)
    if isinstance(seeds, int):
        starts = []
        for _ in range(seeds):
            a = rng.standard_normal(16) + 1j * rng.standard_normal(16)
            # sparse starts help reach the lower-dimensional components
            if rng.uniform() < 0.5:
                support = rng.choice(16, size=rng.integers(2, 8), replace=False)
                mask = np.zeros(16)
                mask[support] = 1.0
                a = a * mask
            a[0] = 0.0
            n = np.linalg.norm(a)
            if n > 0:
                a = a / n
            starts.append(a)
    else:
        starts = [_as_vector(s) for s in seeds]
    hits = []
    for a0 in starts:
        a = _newton(system, a0, tolerance, max_iter)
        if a is not None:
            hits.append(PauliCoeffs(a.reshape(4, 4)))
    return hits


def _newton(system, a, tolerance, max_iter):
    """Gauss-Newton on stacked real/imaginary parts plus the norm pin."""

    def combined(vec):
        vals, jac = _system_values_jacobian(system, vec)
        f = np.concatenate([vals.real, vals.imag, [np.linalg.norm(vec) ** 2 - 1.0]])
        jr = np.concatenate([jac.real, -jac.imag], axis=1)
        ji = np.concatenate([jac.imag, jac.real], axis=1)
        norm_row = np.concatenate([2 * vec.real, 2 * vec.imag])[None, :]
        j = np.concatenate([jr, ji, norm_row], axis=0)
        return f, j, float(np.max(np.abs(vals)))

    vals0, _ = _system_values_jacobian(system, a)
    if float(np.max(np.abs(vals0))) < tolerance:
        return a  # already a root; returned unchanged
    keep = [v for v in range(16) if v != 0]  # A_00 stays pinned
    cols = keep + [v + 16 for v in keep]
    for _ in range(max_iter):
        f, j, res = combined(a)
        if res < tolerance and abs(np.linalg.norm(a) - 1.0) < 1e-8:
            return a
        step, *_ = np.linalg.lstsq(j[:, cols], -f, rcond=None)
        dx = np.zeros(32)
        dx[cols] = step
        da = dx[:16] + 1j * dx[16:]
        base = float(np.linalg.norm(f))
        scale = 1.0
        trial = a
        for _ in range(12):
            trial = a + scale * da
            trial[0] = 0.0
            f_t, _, _ = combined(trial)
            if float(np.linalg.norm(f_t)) <= base or scale < 1e-3:
                break
            scale *= 0.5
        a = trial
    vals, _ = _system_values_jacobian(system, a)
    if float(np.max(np.abs(vals))) < tolerance and abs(np.linalg.norm(a) - 1.0) < 1e-6:
        return a
    return None


# ---------------------------------------------------------------------------
# Exact witnesses for the catalog families
# ---------------------------------------------------------------------------


def _decompose_exact_generic(matrix: np.ndarray) -> np.ndarray:
    """Pauli coefficients of a 4x4 matrix over any ring with GR scalars."""
    out = np.empty((4, 4), dtype=object)
    for i, la in enumerate(PAULI_LABELS):
        for j, lb in enumerate(PAULI_LABELS):
            k = kron(DUAL_EXACT[la], DUAL_EXACT[lb])
            total = None
            for pos in np.ndindex(4, 4):
                term = k.T[pos] * matrix[pos]
                total = term if total is None else total + term
            out[i, j] = total
    return out


def family_symbolic_coeffs(family: str) -> tuple[np.ndarray, list[str]]:
    """Pauli coefficients of a family as exact polynomials in its parameters.

    For C1 the constraint a1 a3 = a2 a4 is eliminated by the polynomial
    parametrization (a1, a2, a3, a4) = (p q, p r, r s, q s), whose image is
    dense in the constraint quadric, so vanishing on it certifies vanishing
    on the whole constrained family.
    """
    fam = _catalog.family_info(family)
    if family == "C1":
        names = ["p", "q", "r", "s", "a5"]
        n = len(names)
        p, q, r, s, a5 = Poly.generators(n)
        params = {"a1": p * q, "a2": p * r, "a3": r * s, "a4": q * s, "a5": a5}
    else:
        names = list(fam.param_names)
        n = len(names)
        gens = Poly.generators(n)
        params = dict(zip(names, gens))
    matrix = np.array(fam.builder(params), dtype=object)
    coeffs = _decompose_exact_generic(matrix)
    nparams = n
    for idx in np.ndindex(4, 4):
        if not isinstance(coeffs[idx], Poly):
            coeffs[idx] = Poly.constant(nparams, coeffs[idx])
    return coeffs, names


def verify_family_symbolically(family: str, system: EquationSystem | None = None):
    """Substitute a family into every equation; returns the failing labels.

    Empty list means every equation reduced to the zero polynomial, exactly.
    """
    if system is None:
        system = commutator_system()
    coeffs, names = family_symbolic_coeffs(family)
    nparams = len(names)
    mapping = {var_index(i, j): coeffs[i, j] for i in range(4) for j in range(4)}
    failing = []
    for label, p in system.equations:
        if p.is_zero:
            continue
        if not p.subs(mapping, nparams).is_zero:
            failing.append(label)
    return failing


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def system_to_json(system: EquationSystem | None = None) -> str:
    """Serialize the grouped system for external solver interop."""
    if system is None:
        system = commutator_system()
    records = []
    for label, p in system.equations:
        monomials = [
            {"exps": list(e), "re": str(c.re), "im": str(c.im)}
            for e, c in sorted(p.terms.items())
        ]
        records.append({"label": label, "monomials": monomials})
    return json.dumps(records, indent=1)


def system_from_json(text: str) -> EquationSystem:
    records = json.loads(text)
    eqs = []
    sizes: dict[str, int] = {}
    for rec in records:
        terms = {
            tuple(m["exps"]): GaussianRational(Fraction(m["re"]), Fraction(m["im"]))
            for m in rec["monomials"]
        }
        eqs.append((rec["label"], Poly(NVARS, terms)))
        group = rec["label"].split(":")[0]
        sizes[group] = sizes.get(group, 0) + 1
    return EquationSystem(eqs, sizes)
