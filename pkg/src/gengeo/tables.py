"""Structure constants for the vectorized pointwise form algebra.

The grid backends re-implement nothing: every table (Clifford action,
Mukai pairing, the quadratic Q-forms) is generated once per dimension by
evaluating the exact symbolic kernel on constant basis forms, then frozen
as integer index arrays for numpy.  That keeps the float path and the
rational path definitionally consistent.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations

import numpy as np

from .algebra import Chart
from .forms import MixedForm, mukai_pairing, wedge
from .generalized import GenSection, clifford_act

Entry = tuple[int, int, int, int]  # (slot, src, dst, sign)


class FormTables:
    """Index tables for forms of one parity on an n-dimensional chart.

    Basis order: index tuples sorted by (degree, lex).  Section slots:
    0..n-1 are the coordinate vector fields, n..2n-1 the coordinate
    1-forms.
    """

    def __init__(self, dim: int):
        self.dim = dim
        chart = Chart(dim)
        all_idx = [idx for k in range(dim + 1) for idx in combinations(range(dim), k)]
        self.even_idx = sorted((i for i in all_idx if len(i) % 2 == 0), key=lambda i: (len(i), i))
        self.odd_idx = sorted((i for i in all_idx if len(i) % 2 == 1), key=lambda i: (len(i), i))
        self.pos = {idx: (len(idx) % 2, k)
                    for parity, basis in ((0, self.even_idx), (1, self.odd_idx))
                    for k, idx in enumerate(basis)}
        self.n_even = len(self.even_idx)
        self.n_odd = len(self.odd_idx)

        # Clifford action entries per source parity: slot s applied to basis
        # src yields sign * dst of the opposite parity.
        self.clifford: dict[int, list[Entry]] = {0: [], 1: []}
        sections = [GenSection.basis(chart, s) for s in range(2 * dim)]
        for parity, basis in ((0, self.even_idx), (1, self.odd_idx)):
            for src, idx in enumerate(basis):
                form = MixedForm.basis(chart, idx)
                for slot, sec in enumerate(sections):
                    out = clifford_act(sec, form)
                    for out_idx, coeff in out.terms.items():
                        value = coeff.constant_value()
                        _, dst = self.pos[out_idx]
                        self.clifford[parity].append((slot, src, dst, int(value)))

        # d entries: dx_i ^ (basis src) -> sign * dst, consumed by grid d.
        self.ext: dict[int, list[tuple[int, int, int, int]]] = {0: [], 1: []}
        for parity, basis in ((0, self.even_idx), (1, self.odd_idx)):
            for src, idx in enumerate(basis):
                form = MixedForm.basis(chart, idx)
                for i in range(dim):
                    out = wedge(MixedForm.basis(chart, (i,)), form)
                    for out_idx, coeff in out.terms.items():
                        _, dst = self.pos[out_idx]
                        self.ext[parity].append((i, src, dst, int(coeff.constant_value())))

        # Mukai pairing signs: <odd a, even b> and <even a, odd b> when the
        # index sets are complementary (only parity-mixed pairs survive in
        # odd dimension; even-even pairs appear for even dim).
        self.mukai: dict[tuple[int, int], list[tuple[int, int, int]]] = {}
        for pa, basis_a in ((0, self.even_idx), (1, self.odd_idx)):
            for pb, basis_b in ((0, self.even_idx), (1, self.odd_idx)):
                entries = []
                for a, ia in enumerate(basis_a):
                    for b, ib in enumerate(basis_b):
                        val = mukai_pairing(MixedForm.basis(chart, ia), MixedForm.basis(chart, ib))
                        cv = val.constant_value()
                        if cv:
                            entries.append((a, b, int(cv)))
                if entries:
                    self.mukai[(pa, pb)] = entries

    # -- vectorized operations (leading axis = component, rest = grid) -----

    def clifford_apply(self, section: np.ndarray, form: np.ndarray, parity: int) -> np.ndarray:
        """(X + xi) . form for numeric fields; returns the opposite parity."""
        n_out = self.n_odd if parity == 0 else self.n_even
        out = np.zeros((n_out,) + form.shape[1:], dtype=form.dtype)
        for slot, src, dst, sign in self.clifford[parity]:
            if sign == 1:
                out[dst] += section[slot] * form[src]
            else:
                out[dst] -= section[slot] * form[src]
        return out

    def mukai_apply(self, a: np.ndarray, b: np.ndarray, parity_a: int, parity_b: int) -> np.ndarray:
        entries = self.mukai.get((parity_a, parity_b), [])
        out = np.zeros(a.shape[1:], dtype=a.dtype)
        for i, j, sign in entries:
            if sign == 1:
                out += a[i] * b[j]
            else:
                out -= a[i] * b[j]
        return out

    def d_apply(self, derivs: np.ndarray, parity: int) -> np.ndarray:
        """Assemble d(form) from derivs[i, src, ...] = d(form[src])/dx_i."""
        n_out = self.n_odd if parity == 0 else self.n_even
        out = np.zeros((n_out,) + derivs.shape[2:], dtype=derivs.dtype)
        for i, src, dst, sign in self.ext[parity]:
            if sign == 1:
                out[dst] += derivs[i, src]
            else:
                out[dst] -= derivs[i, src]
        return out


class QTables:
    """Quadratic forms behind Q(phi) on a five-dimensional chart.

    q_entries[slot] lists (a, b, coeff) with component_slot(phi) =
    sum coeff * phi_a * phi_b = 2 <e_slot . phi, phi>, phi even.
    """

    def __init__(self, dim: int = 5):
        if dim != 5:
            raise ValueError("Q tables are five-dimensional")
        self.dim = dim
        chart = Chart(dim)
        forms = form_tables(dim)
        self.forms = forms
        sections = [GenSection.basis(chart, s) for s in range(2 * dim)]
        # Pairing against dx_i reads off X^i, pairing against d/dx_i reads
        # off xi_i, so output slot `s` is fed by the dual basis section.
        self.q_entries: list[list[tuple[int, int, int]]] = []
        for slot in range(2 * dim):
            dual = (slot + dim) % (2 * dim)
            entries = []
            for a, ia in enumerate(forms.even_idx):
                ea = MixedForm.basis(chart, ia)
                acted = clifford_act(sections[dual], ea)
                for b, ib in enumerate(forms.even_idx):
                    val = mukai_pairing(acted, MixedForm.basis(chart, ib))
                    cv = val.constant_value()
                    if cv:
                        entries.append((a, b, 2 * int(cv)))
            self.q_entries.append(entries)

    def q_apply(self, phi: np.ndarray) -> np.ndarray:
        """Densitized Q(phi): slots [X^1..X^5, xi_1..xi_5]."""
        out = np.zeros((2 * self.dim,) + phi.shape[1:], dtype=phi.dtype)
        for slot, entries in enumerate(self.q_entries):
            acc = out[slot]
            for a, b, coeff in entries:
                acc += coeff * (phi[a] * phi[b])
        return out

    def p_apply(self, phi: np.ndarray, psi: np.ndarray) -> np.ndarray:
        """Densitized symmetric P(phi, psi)."""
        out = np.zeros((2 * self.dim,) + phi.shape[1:], dtype=phi.dtype)
        for slot, entries in enumerate(self.q_entries):
            acc = out[slot]
            for a, b, coeff in entries:
                acc += (coeff * 0.5) * (phi[a] * psi[b] + psi[a] * phi[b])
        return out


def section_inner(u: np.ndarray, v: np.ndarray, dim: int) -> np.ndarray:
    """Pointwise (u, v) = (i_{X_u} xi_v + i_{X_v} xi_u)/2 for numeric fields."""
    acc = np.zeros(u.shape[1:], dtype=u.dtype)
    for i in range(dim):
        acc += u[i] * v[dim + i] + v[i] * u[dim + i]
    return 0.5 * acc


@lru_cache(maxsize=None)
def form_tables(dim: int) -> FormTables:
    return FormTables(dim)


@lru_cache(maxsize=None)
def q_tables() -> QTables:
    return QTables(5)
