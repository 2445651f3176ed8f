"""Generalized metrics as splittings C = g + B and their torsion connections.

The splitting tensor C lifts vector fields into T+T* two ways,
X+ = X + i_X C (into V) and X- = X - i_X C^T (into the orthogonal
complement), and the Courant bracket of the two lifts produces a metric
connection whose torsion is the closed 3-form -dB.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .algebra import Chart, Polynomial, Rational, invert_matrix, solve_linear
from .forms import MixedForm, VectorField, exterior_derivative, vf_bracket
from .generalized import GenSection, courant_bracket


class GeneralizedMetric:
    """Splitting tensor C (n x n polynomials); g = sym C, B = skew C, H = dB."""

    def __init__(self, chart: Chart, c_matrix: Sequence[Sequence[Polynomial]]):
        n = chart.dim
        if len(c_matrix) != n or any(len(row) != n for row in c_matrix):
            raise ValueError("C must be an n x n matrix of polynomials")
        for row in c_matrix:
            for p in row:
                chart.require_same(p.chart)
        self.chart = chart
        self.c = [list(row) for row in c_matrix]

    @staticmethod
    def from_g_and_b(chart: Chart, g: Sequence[Sequence[Polynomial]],
                     b: Sequence[Sequence[Polynomial]] | None = None) -> "GeneralizedMetric":
        n = chart.dim
        zero = Polynomial.zero(chart)
        c = [[g[i][j] + (b[i][j] if b else zero) for j in range(n)] for i in range(n)]
        return GeneralizedMetric(chart, c)

    def g_entry(self, i: int, j: int) -> Polynomial:
        half = Polynomial.constant(self.chart, "1/2")
        return (self.c[i][j] + self.c[j][i]) * half

    def b_entry(self, i: int, j: int) -> Polynomial:
        half = Polynomial.constant(self.chart, "1/2")
        return (self.c[i][j] - self.c[j][i]) * half

    def b_form(self) -> MixedForm:
        """The curving 2-form B = sum_{i<j} B_ij dx_i ^ dx_j."""
        n = self.chart.dim
        return MixedForm(self.chart, {(i, j): self.b_entry(i, j)
                                      for i in range(n) for j in range(i + 1, n)})

    def h_form(self) -> MixedForm:
        """The curvature H = dB, a closed 3-form."""
        return exterior_derivative(self.b_form())

    def g_at(self, point: Sequence[Rational]) -> list[list[Fraction]]:
        n = self.chart.dim
        return [[self.g_entry(i, j).evaluate(point) for j in range(n)] for i in range(n)]


def lift(x: VectorField, sign: str, v: GeneralizedMetric) -> GenSection:
    """X+ = X + i_X C (sign '+'), X- = X - i_X C^T (sign '-').

    Row contraction: i_X C(Y) = C(X, Y).
    """
    x.chart.require_same(v.chart)
    n = v.chart.dim
    if sign == "+":
        comps = {j: sum((x.components[i] * v.c[i][j] for i in range(n)),
                        Polynomial.zero(v.chart)) for j in range(n)}
    elif sign == "-":
        comps = {j: sum((-(x.components[i] * v.c[j][i]) for i in range(n)),
                        Polynomial.zero(v.chart)) for j in range(n)}
    else:
        raise ValueError("sign must be '+' or '-'")
    oneform = MixedForm(v.chart, {(j,): p for j, p in comps.items()})
    return GenSection(x, oneform)


def delta(x: VectorField, y: VectorField, v: GeneralizedMetric) -> MixedForm:
    """Delta_X Y = [X-, Y+] - [X,Y]-  (a pure 1-form; vector part must vanish)."""
    bracket = courant_bracket(lift(x, "-", v), lift(y, "+", v))
    bracket = bracket - lift(vf_bracket(x, y), "-", v)
    if not bracket.vector.is_zero:
        raise RuntimeError("internal error: Delta_X Y has a nonvanishing vector part")
    return bracket.oneform


def delta_swapped(x: VectorField, y: VectorField, v: GeneralizedMetric) -> MixedForm:
    """Delta with the roles of V and its complement interchanged."""
    bracket = courant_bracket(lift(x, "+", v), lift(y, "-", v))
    bracket = bracket - lift(vf_bracket(x, y), "+", v)
    if not bracket.vector.is_zero:
        raise RuntimeError("internal error: swapped Delta_X Y has a nonvanishing vector part")
    return bracket.oneform


def coordinate_deltas(v: GeneralizedMetric, swapped: bool = False) -> list[list[MixedForm]]:
    """Delta_{d/dx_i} d/dx_j for all coordinate pairs."""
    n = v.chart.dim
    dl = delta_swapped if swapped else delta
    fields = [VectorField.coordinate(v.chart, i) for i in range(n)]
    return [[dl(fields[i], fields[j], v) for j in range(n)] for i in range(n)]


def connection_at(v: GeneralizedMetric, point: Sequence[Rational],
                  deltas: list[list[MixedForm]] | None = None) -> list[list[list[Fraction]]]:
    """Connection coefficients Gamma[l][i][j] at a rational point.

    Solves Delta_{d/dx_i} d/dx_j = 2 g(nabla_{d/dx_i} d/dx_j) exactly;
    raises ZeroDivisionError where g is singular.
    """
    n = v.chart.dim
    if deltas is None:
        deltas = coordinate_deltas(v)
    g = v.g_at(point)
    two_g = [[2 * g[k][l] for l in range(n)] for k in range(n)]
    gamma = [[[Fraction(0)] * n for _ in range(n)] for _ in range(n)]
    for i in range(n):
        for j in range(n):
            rhs = [deltas[i][j].coefficient((k,)).evaluate(point) for k in range(n)]
            sol = solve_linear(two_g, rhs)
            for l in range(n):
                gamma[l][i][j] = sol[l]
    return gamma


# spec-facing name: the connection is extracted pointwise (g^{-1} is not
# polynomial in general), so `connection` takes the evaluation point.
connection = connection_at


def christoffel_classical_at(v: GeneralizedMetric,
                             point: Sequence[Rational]) -> list[list[list[Fraction]]]:
    """Independent Levi-Civita oracle: Gamma^l_ij = g^{lk}(g_jk,i + g_ik,j - g_ij,k)/2."""
    n = v.chart.dim
    g_inv = invert_matrix(v.g_at(point))
    dg = [[[v.g_entry(i, j).differentiate(k).evaluate(point) for k in range(n)]
           for j in range(n)] for i in range(n)]
    gamma = [[[Fraction(0)] * n for _ in range(n)] for _ in range(n)]
    for l in range(n):
        for i in range(n):
            for j in range(n):
                acc = Fraction(0)
                for k in range(n):
                    acc += g_inv[l][k] * (dg[j][k][i] + dg[i][k][j] - dg[i][j][k])
                gamma[l][i][j] = acc / 2
    return gamma


@dataclass
class TorsionReport:
    """Exact residuals for the skew-torsion identity on coordinate fields."""

    torsion_matches_minus_h: bool
    metric_compatible: bool
    torsion_residuals: list[Polynomial] = field(default_factory=list)
    compatibility_residuals: list[Polynomial] = field(default_factory=list)
    definiteness_warnings: list[str] = field(default_factory=list)
    expected_sign: int = -1

    @property
    def all_zero(self) -> bool:
        return self.torsion_matches_minus_h and self.metric_compatible


def torsion_check(v: GeneralizedMetric, points: Sequence[Sequence[Rational]] | None = None,
                  swapped: bool = False) -> TorsionReport:
    """Check the skew-torsion identity and metric compatibility exactly.

    The lowered torsion satisfies, as 1-forms and with nested contraction
    i_X(i_Y(.)),

        (Delta_X Y - Delta_Y X)/2 - g[X,Y] = -i_X i_Y H,      H = dB,

    so the torsion lowered with the bundle's induced metric is -H; with
    `swapped` the induced metric is -g and the torsion read against g is
    +H.  Both sides are polynomial, so this is an exact identity; `points`
    only feeds the positive-definiteness warning.
    """
    n = v.chart.dim
    deltas = coordinate_deltas(v, swapped=swapped)
    h = v.h_form()
    sign = 1 if swapped else -1
    half = Polynomial.constant(v.chart, "1/2")

    from .forms import interior_product

    torsion_residuals = []
    for i in range(n):
        for j in range(i + 1, n):
            lowered = (deltas[i][j] - deltas[j][i]).scale(half)
            expected = -interior_product(VectorField.coordinate(v.chart, i),
                                         interior_product(VectorField.coordinate(v.chart, j), h))
            diff = lowered - expected
            for k in range(n):
                torsion_residuals.append(diff.coefficient((k,)))

    # X g(Y,Z) = g(nabla_X Y, Z) + g(Y, nabla_X Z) on coordinate fields;
    # the swapped branch uses the induced metric -g of the complement.
    gsign = -1 if swapped else 1
    compat_residuals = []
    for i in range(n):
        for j in range(n):
            for k in range(n):
                dg = v.g_entry(j, k).differentiate(i) * Polynomial.constant(v.chart, gsign)
                rhs = (deltas[i][j].coefficient((k,)) + deltas[i][k].coefficient((j,))) * half
                compat_residuals.append(dg - rhs)

    warnings = []
    for pt in points or []:
        g = v.g_at(pt)
        if not _is_positive_definite(g):
            warnings.append(f"g not positive definite at {tuple(str(x) for x in pt)}")

    return TorsionReport(
        torsion_matches_minus_h=all(r.is_zero for r in torsion_residuals),
        metric_compatible=all(r.is_zero for r in compat_residuals),
        torsion_residuals=torsion_residuals,
        compatibility_residuals=compat_residuals,
        definiteness_warnings=warnings,
        expected_sign=sign,
    )


def _is_positive_definite(g: list[list[Fraction]]) -> bool:
    # leading principal minors, exact
    n = len(g)
    for k in range(1, n + 1):
        if _det([row[:k] for row in g[:k]]) <= 0:
            return False
    return True


def _det(m: list[list[Fraction]]) -> Fraction:
    n = len(m)
    m = [row[:] for row in m]
    det = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if m[r][col]), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            m[col], m[pivot] = m[pivot], m[col]
            det = -det
        det *= m[col][col]
        for r in range(col + 1, n):
            factor = m[r][col] / m[col][col]
            m[r] = [x - factor * y for x, y in zip(m[r], m[col])]
    return det


def random_metric(chart: Chart, rng, eps_degree: int = 1) -> GeneralizedMetric:
    """Identity plus a small random symmetric part and a random skew part.

    The symmetric perturbation has coefficients in 1/8 Z to keep g invertible
    (diagonally dominant) at the small rational sample points used in suites.
    """
    from .algebra import random_polynomial

    n = chart.dim
    zero = Polynomial.zero(chart)
    g = [[zero for _ in range(n)] for _ in range(n)]
    b = [[zero for _ in range(n)] for _ in range(n)]
    for i in range(n):
        g[i][i] = Polynomial.constant(chart, 1)
    for i in range(n):
        for j in range(i, n):
            bump = random_polynomial(chart, rng, max_degree=eps_degree, max_terms=2,
                                     coeff_bound=1) * Polynomial.constant(chart, "1/8")
            g[i][j] = g[i][j] + bump
            g[j][i] = g[j][i] + bump
    for i in range(n):
        for j in range(i + 1, n):
            skew = random_polynomial(chart, rng, max_degree=eps_degree, max_terms=2)
            b[i][j] = skew
            b[j][i] = -skew
    return GeneralizedMetric.from_g_and_b(chart, g, b)
