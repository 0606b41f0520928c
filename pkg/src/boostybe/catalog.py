"""The fourteen solution families with two-dimensional local Hilbert space.

Eight families of eight-or-fewer-vertex (XYZ) type and six classes with
explicit closed-form R-matrices.  Hamiltonian builders are ring-generic:
they accept complex numbers or exact polynomials, so the same matrix
templates feed both the numeric evaluators and the symbolic integrability
witness.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .exact import Poly
from .tensor_core import LocalDensity, permutation_op

XYZ_FAMILIES = ("XYZ1", "XYZ2", "XYZ3", "XYZ4", "XYZ5", "XYZ6", "XYZ7", "XYZ8")
CLASS_FAMILIES = ("C1", "C2", "C3", "C4", "C5", "C6")
ALL_FAMILIES = XYZ_FAMILIES + CLASS_FAMILIES


@dataclass
class ParamVector:
    """Named complex parameters of one model family."""

    family: str
    values: dict[str, complex]

    def __post_init__(self):
        fam = family_info(self.family)
        missing = [n for n in fam.param_names if n not in self.values]
        if missing:
            raise ValueError(f"{self.family}: missing parameters {missing}")
        self.values = {n: complex(self.values[n]) for n in fam.param_names}
        err = constraint_residual(self.family, self.values)
        if err > 1e-12:
            raise ValueError(
                f"{self.family}: constraint violated by {err:.3e} "
                f"({'; '.join(fam.constraint_strings)})"
            )

    def __getitem__(self, name: str) -> complex:
        return self.values[name]


@dataclass
class RMatrixFn:
    """Analytic-near-0 map u -> 4x4 complex matrix with model metadata."""

    family: str | None
    params: dict[str, complex]
    fn: Callable[[complex], np.ndarray]
    singular_points: tuple[complex, ...] = ()
    provenance: str = "closed"
    meta: dict = field(default_factory=dict)

    def __call__(self, u: complex) -> np.ndarray:
        bad = self.nearest_singularity(u)
        if bad is not None:
            raise ValueError(
                f"u = {u} is within 1e-8 of the singular point {bad} of {self.family}"
            )
        return np.asarray(self.fn(complex(u)), dtype=complex)

    def nearest_singularity(self, u: complex, margin: float = 1e-8):
        for s in self.singular_points:
            if abs(complex(u) - s) < margin:
                return s
        return None


# ---------------------------------------------------------------------------
# Hamiltonian templates (ring-generic: entries built from +, -, * only)
# ---------------------------------------------------------------------------


def _xyz1(p):
    return [
        [p["a1"], 0, 0, 0],
        [0, p["b1"], 0, 0],
        [0, 0, p["b2"], 0],
        [0, 0, 0, p["a2"]],
    ]


def _xyz2(p):
    return [
        [p["a1"], 0, 0, 0],
        [0, p["b1"], p["c1"], 0],
        [0, p["c2"], p["b2"], 0],
        [0, 0, 0, p["a1"]],
    ]


def _xyz3(p):
    # corner pinned by a1 + a2 = b1 + b2, the second branch of the exact
    # six-vertex integrability condition c_i (a1-a2)(a1+a2-b1-b2) = 0
    return [
        [p["a1"], 0, 0, 0],
        [0, p["b1"], p["c1"], 0],
        [0, p["c2"], p["b2"], 0],
        [0, 0, 0, p["b1"] + p["b2"] - p["a1"]],
    ]


def _xyz4(p):
    return [
        [p["a1"], 0, 0, p["d1"]],
        [0, p["a1"] + p["b1"], p["c1"], 0],
        [0, -p["c1"], p["a1"] - p["b1"], 0],
        [0, 0, 0, p["a1"]],
    ]


def _xyz5(p):
    return [
        [p["a1"], 0, 0, p["d1"]],
        [0, p["a1"] - p["c2"], p["c1"], 0],
        [0, p["c2"], p["a1"] - p["c1"], 0],
        [0, 0, 0, p["a1"] - p["c1"] - p["c2"]],
    ]


def _xyz6(p):
    return [
        [p["a1"], 0, 0, p["d1"]],
        [0, p["b1"], p["c1"], 0],
        [0, p["c1"], p["b1"], 0],
        [p["d2"], 0, 0, p["a1"]],
    ]


def _xyz7(p):
    return [
        [p["a1"], 0, 0, p["d1"]],
        [0, p["b1"], p["c1"], 0],
        [0, p["c1"], p["b1"], 0],
        [p["d2"], 0, 0, 2 * p["b1"] - p["a1"]],
    ]


def _xyz8(p):
    return [
        [p["a1"], 0, 0, p["d1"]],
        [0, p["a1"], p["b1"], 0],
        [0, -p["b1"], p["a1"], 0],
        [p["d2"], 0, 0, p["a1"]],
    ]


def _c1(p):
    return [
        [0, p["a1"], p["a2"], 0],
        [0, p["a5"], 0, p["a3"]],
        [0, 0, -p["a5"], p["a4"]],
        [0, 0, 0, 0],
    ]


def _c2(p):
    return [
        [0, p["a2"], p["a3"] - p["a2"], p["a5"]],
        [0, p["a1"], 0, p["a4"]],
        [0, 0, -p["a1"], p["a3"] - p["a4"]],
        [0, 0, 0, 0],
    ]


def _c3(p):
    return [
        [-p["a1"], (2 * p["a1"] - p["a2"]) * p["a3"], (2 * p["a1"] + p["a2"]) * p["a3"], 0],
        [0, p["a1"] - p["a2"], 0, 0],
        [0, 0, p["a1"] + p["a2"], 0],
        [0, 0, 0, -p["a1"]],
    ]


def _c4(p):
    return [
        [p["a1"], p["a2"], p["a2"], p["a3"]],
        [0, -p["a1"], 0, p["a4"]],
        [0, 0, -p["a1"], p["a4"]],
        [0, 0, 0, p["a1"]],
    ]


def _c5(p):
    return [
        [p["a1"], p["a2"], -p["a2"], 0],
        [0, -p["a1"], 2 * p["a1"], p["a3"]],
        [0, 2 * p["a1"], -p["a1"], -p["a3"]],
        [0, 0, 0, p["a1"]],
    ]


def _c6(p):
    return [
        [p["a1"], p["a2"], p["a2"], 0],
        [0, -p["a1"], 2 * p["a1"], -p["a2"]],
        [0, 2 * p["a1"], -p["a1"], -p["a2"]],
        [0, 0, 0, p["a1"]],
    ]


# ---------------------------------------------------------------------------
# Safe scalar functions for the removable singularities of the closed forms
# ---------------------------------------------------------------------------

_SMALL = 1e-4


def _expm1_over(x: complex) -> complex:
    """(e^x - 1)/x, analytic at 0."""
    if abs(x) < _SMALL:
        return 1 + x / 2 + x * x / 6 + x * x * x / 24
    return (cmath.exp(x) - 1) / x


def _cosh1_over_sq(x: complex) -> complex:
    """(cosh x - 1)/x^2, analytic at 0."""
    if abs(x) < _SMALL:
        x2 = x * x
        return 0.5 + x2 / 24 + x2 * x2 / 720
    return (cmath.cosh(x) - 1) / (x * x)


def _x_over_sinh(x: complex) -> complex:
    """x/sinh x, analytic at 0 (poles at x = i k pi, k != 0)."""
    if abs(x) < _SMALL:
        x2 = x * x
        return 1 - x2 / 6 + 7 * x2 * x2 / 360
    return x / cmath.sinh(x)


def _tanh_half_over(x: complex) -> complex:
    """tanh(x/2)/x, analytic at 0."""
    if abs(x) < _SMALL:
        x2 = x * x
        return 0.5 - x2 / 24 + x2 * x2 / 240
    return cmath.tanh(x / 2) / x


def _sinh_over(x: complex) -> complex:
    """sinh(x)/x, analytic at 0."""
    if abs(x) < _SMALL:
        x2 = x * x
        return 1 + x2 / 6 + x2 * x2 / 120
    return cmath.sinh(x) / x


# ---------------------------------------------------------------------------
# Closed-form R-matrices
# ---------------------------------------------------------------------------


def _r1(p):
    a1, a2, a3, a4, a5 = (p[k] for k in ("a1", "a2", "a3", "a4", "a5"))

    def fn(u):
        x = a5 * u
        ep, em = cmath.exp(x), cmath.exp(-x)
        return np.array(
            [
                [1, a1 * u * _expm1_over(x), a2 * u * _expm1_over(-x),
                 (a1 * a3 + a2 * a4) * u * u * _cosh1_over_sq(x)],
                [0, 0, em, a4 * u * _expm1_over(-x)],
                [0, ep, 0, a3 * u * _expm1_over(x)],
                [0, 0, 0, 1],
            ],
            dtype=complex,
        )

    return fn, ()


def _r2(p):
    a1 = p["a1"]
    h = np.array(_c2(p), dtype=complex)
    h2 = h @ h
    perm = permutation_op()

    def fn(u):
        x = a1 * u
        core = _x_over_sinh(x) * np.eye(4) + u * h + u * u * _tanh_half_over(x) * h2
        return perm @ core

    if abs(a1) > 1e-12:
        sing = tuple(
            1j * k * cmath.pi / a1 for k in (-2, -1, 1, 2) if abs(k * cmath.pi / a1) < 4.0
        )
    else:
        sing = ()
    return fn, sing


def _r3(p):
    a1, a2, a3 = p["a1"], p["a2"], p["a3"]

    def fn(u):
        em = cmath.exp(-a1 * u)
        ep_minus = cmath.exp((a1 - a2) * u)
        ep_plus = cmath.exp((a1 + a2) * u)
        return np.array(
            [
                [em, a3 * (ep_minus - em), a3 * (ep_plus - em), 0],
                [0, 0, ep_plus, 0],
                [0, ep_minus, 0, 0],
                [0, 0, 0, em],
            ],
            dtype=complex,
        )

    return fn, ()


def _r4(p):
    a1, a2, a3, a4 = (p[k] for k in ("a1", "a2", "a3", "a4"))

    def fn(u):
        x = a1 * u
        ep, em = cmath.exp(x), cmath.exp(-x)
        sh = _sinh_over(x)  # sinh(x)/x
        corner = ep * (a2 * a4 * u * u * sh * sh + a3 * u * sh * cmath.cosh(x))
        return np.array(
            [
                [ep, a2 * u * sh, a2 * u * sh, corner],
                [0, 0, em, a4 * u * sh],
                [0, em, 0, a4 * u * sh],
                [0, 0, 0, ep],
            ],
            dtype=complex,
        )

    return fn, ()


def _r5(p):
    a1, a2, a3 = p["a1"], p["a2"], p["a3"]

    def fn(u):
        f = 1 - a1 * u
        g = 2 * a1 * u
        return f * np.array(
            [
                [g + 1, a2 * u, -a2 * u, a2 * a3 * u * u],
                [0, g, 1, -a3 * u],
                [0, 1, g, a3 * u],
                [0, 0, 0, g + 1],
            ],
            dtype=complex,
        )

    return fn, ()


def _r6(p):
    a1, a2 = p["a1"], p["a2"]

    def fn(u):
        # prefactor (1 - a1 u)(1 + 2 a1 u) cancels the 1/(2 a1 u + 1) poles,
        # so the entries are spelled out in expanded polynomial form
        f = 1 - a1 * u
        g = 2 * a1 * u
        fg = f * (g + 1)
        return np.array(
            [
                [fg, a2 * u * fg, a2 * u * fg, -a2 * a2 * u * u * (g + 1) * fg],
                [0, g * f, f, -a2 * u * fg],
                [0, f, g * f, -a2 * u * fg],
                [0, 0, 0, fg],
            ],
            dtype=complex,
        )

    return fn, ()


def _c1_constraint(v: dict[str, complex]) -> float:
    return abs(v["a1"] * v["a3"] - v["a2"] * v["a4"])


@dataclass
class ModelFamily:
    """Metadata and builders for one of the fourteen families."""

    id: str
    param_names: tuple[str, ...]
    builder: Callable
    constraint_strings: tuple[str, ...] = ()
    constraint_residual: Callable[[dict], float] | None = None
    r_builder: Callable | None = None

    @property
    def has_closed_R(self) -> bool:
        return self.r_builder is not None


_FAMILIES: dict[str, ModelFamily] = {}


def _register(fam: ModelFamily):
    _FAMILIES[fam.id] = fam


_register(ModelFamily("XYZ1", ("a1", "b1", "b2", "a2"), _xyz1))
_register(ModelFamily("XYZ2", ("a1", "b1", "b2", "c1", "c2"), _xyz2))
_register(ModelFamily("XYZ3", ("a1", "b1", "b2", "c1", "c2"), _xyz3))
_register(ModelFamily("XYZ4", ("a1", "b1", "c1", "d1"), _xyz4))
_register(ModelFamily("XYZ5", ("a1", "c1", "c2", "d1"), _xyz5))
_register(ModelFamily("XYZ6", ("a1", "b1", "c1", "d1", "d2"), _xyz6))
_register(ModelFamily("XYZ7", ("a1", "b1", "c1", "d1", "d2"), _xyz7))
_register(ModelFamily("XYZ8", ("a1", "b1", "d1", "d2"), _xyz8))
_register(
    ModelFamily(
        "C1",
        ("a1", "a2", "a3", "a4", "a5"),
        _c1,
        ("a1*a3 - a2*a4 = 0",),
        _c1_constraint,
        _r1,
    )
)
_register(ModelFamily("C2", ("a1", "a2", "a3", "a4", "a5"), _c2, (), None, _r2))
_register(ModelFamily("C3", ("a1", "a2", "a3"), _c3, (), None, _r3))
_register(ModelFamily("C4", ("a1", "a2", "a3", "a4"), _c4, (), None, _r4))
_register(ModelFamily("C5", ("a1", "a2", "a3"), _c5, (), None, _r5))
_register(ModelFamily("C6", ("a1", "a2"), _c6, (), None, _r6))


def family_info(family: str) -> ModelFamily:
    try:
        return _FAMILIES[family]
    except KeyError:
        raise KeyError(f"unknown family {family!r}; known: {', '.join(ALL_FAMILIES)}")


def constraint_residual(family: str, values: dict[str, complex]) -> float:
    fam = family_info(family)
    if fam.constraint_residual is None:
        return 0.0
    return fam.constraint_residual(values)


def _as_param_dict(family: str, params) -> dict[str, complex]:
    if isinstance(params, ParamVector):
        if params.family != family:
            raise ValueError(f"ParamVector for {params.family} used with {family}")
        return params.values
    vec = ParamVector(family, dict(params))
    return vec.values


def hamiltonian(family: str, params) -> LocalDensity:
    """The literal 4x4 Hamiltonian density of a family at given parameters."""
    fam = family_info(family)
    values = _as_param_dict(family, params)
    return LocalDensity(2, np.array(fam.builder(values), dtype=complex))


def hamiltonian_template(family: str) -> list[list]:
    """Entries as exact polynomials in the family's parameters."""
    fam = family_info(family)
    n = len(fam.param_names)
    gens = {name: Poly.variable(i, n) for i, name in enumerate(fam.param_names)}
    return fam.builder(gens)


def hamiltonian_display(family: str) -> list[list[str]]:
    """Entry strings with symbolic parameter placeholders."""
    fam = family_info(family)
    names = list(fam.param_names)
    out = []
    for row in hamiltonian_template(family):
        out.append([e.format(names) if isinstance(e, Poly) else str(e) for e in row])
    return out


def rmatrix(family: str, params) -> RMatrixFn:
    """Closed-form R-matrix evaluator; defined for C1..C6 only.

    XYZ-type families have no closed form here; build one on demand with
    ``ybe_verify.series_solve`` followed by ``series_to_rmatrix``.
    """
    fam = family_info(family)
    if fam.r_builder is None:
        raise ValueError(
            f"{family} has no closed-form R-matrix; use the series solver"
        )
    values = _as_param_dict(family, params)
    fn, singular = fam.r_builder(values)
    return RMatrixFn(family, values, fn, tuple(singular), "closed")


def list_families() -> list[dict]:
    out = []
    for fid in ALL_FAMILIES:
        fam = _FAMILIES[fid]
        out.append(
            {
                "family": fid,
                "params": list(fam.param_names),
                "constraints": list(fam.constraint_strings),
                "has_closed_R": fam.has_closed_R,
            }
        )
    return out


def sample_params(family: str, seed: int = 0) -> ParamVector:
    """Deterministic pseudo-random parameters satisfying the constraints.

    Magnitudes are kept in [0.3, 0.9] so closed-form singularities stay far
    from the sampling disk used by the residual checks.
    """
    fam = family_info(family)
    rng = np.random.default_rng([seed, ALL_FAMILIES.index(family)])

    def draw():
        mag = rng.uniform(0.3, 0.9)
        phase = rng.uniform(0, 2 * np.pi)
        return mag * complex(np.cos(phase), np.sin(phase))

    values = {name: draw() for name in fam.param_names}
    if family == "C1":
        # solve the constraint for a4 (a2 is bounded away from 0 by the draw)
        values["a4"] = values["a1"] * values["a3"] / values["a2"]
    return ParamVector(family, values)
