"""Exact two-phase simplex over ``Fraction``.

Solves ``max c.x  s.t.  A_ub x <= b_ub,  A_eq x = b_eq,  x >= 0`` with a
dense tableau and Bland's rule, so it terminates on degenerate problems and
returns an optimal basic solution with exact rational entries.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class LPResult:
    status: str
    x: tuple[Fraction, ...] | None
    objective: Fraction | None
    basis: tuple[int, ...] = ()
    pivots: int = 0


class _Tableau:
    def __init__(self, rows, rhs, basis):
        self.rows = rows
        self.rhs = rhs
        self.basis = basis
        self.pivots = 0

    def pivot(self, pr: int, pc: int, obj: list, obj_val: list) -> None:
        prow = self.rows[pr]
        piv = prow[pc]
        if piv != 1:
            inv = 1 / piv
            for j in range(len(prow)):
                if prow[j]:
                    prow[j] *= inv
            self.rhs[pr] *= inv
        nz = [j for j, a in enumerate(prow) if a]
        prhs = self.rhs[pr]
        for r, row in enumerate(self.rows):
            if r == pr:
                continue
            a = row[pc]
            if a:
                for j in nz:
                    row[j] -= a * prow[j]
                self.rhs[r] -= a * prhs
        a = obj[pc]
        if a:
            for j in nz:
                obj[j] -= a * prow[j]
            obj_val[0] += a * prhs
        self.basis[pr] = pc
        self.pivots += 1

    def run(self, obj: list, obj_val: list, allowed: int) -> str:
        """Maximize; ``obj`` holds reduced costs (positive = improving)."""
        while True:
            pc = next((j for j in range(allowed) if obj[j] > 0), None)
            if pc is None:
                return OPTIMAL
            best = None
            for r, row in enumerate(self.rows):
                a = row[pc]
                if a > 0:
                    ratio = self.rhs[r] / a
                    key = (ratio, self.basis[r])
                    if best is None or key < best[0]:
                        best = (key, r)
            if best is None:
                return UNBOUNDED
            self.pivot(best[1], pc, obj, obj_val)


def _frac_rows(a) -> list[list[Fraction]]:
    return [[Fraction(x) for x in row] for row in a]


def linprog_exact(
    c: Sequence,
    A_ub: Sequence[Sequence] | None = None,
    b_ub: Sequence | None = None,
    A_eq: Sequence[Sequence] | None = None,
    b_eq: Sequence | None = None,
) -> LPResult:
    n = len(c)
    ub = _frac_rows(A_ub or ())
    eq = _frac_rows(A_eq or ())
    bub = [Fraction(x) for x in b_ub or ()]
    beq = [Fraction(x) for x in b_eq or ()]
    if len(ub) != len(bub) or len(eq) != len(beq):
        raise ValueError("constraint matrix and right-hand side lengths differ")
    n_slack = len(ub)
    n_rows = len(ub) + len(eq)

    rows: list[list[Fraction]] = []
    rhs: list[Fraction] = []
    needs_art: list[bool] = []
    for i, (row, b) in enumerate(zip(ub, bub)):
        full = row + [Fraction(0)] * n_slack
        full[n + i] = Fraction(1)
        if b < 0:
            full = [-x for x in full]
            b = -b
            needs_art.append(True)
        else:
            needs_art.append(False)
        rows.append(full)
        rhs.append(b)
    for row, b in zip(eq, beq):
        full = row + [Fraction(0)] * n_slack
        if b < 0:
            full = [-x for x in full]
            b = -b
        rows.append(full)
        rhs.append(b)
        needs_art.append(True)

    art_rows = [r for r in range(n_rows) if needs_art[r]]
    n_struct = n + n_slack
    n_art = len(art_rows)
    basis = []
    for r in range(n_rows):
        rows[r].extend([Fraction(0)] * n_art)
    for a, r in enumerate(art_rows):
        rows[r][n_struct + a] = Fraction(1)
    for r in range(n_rows):
        if needs_art[r]:
            basis.append(n_struct + art_rows.index(r))
        else:
            basis.append(n + r)
    tab = _Tableau(rows, rhs, basis)
    width = n_struct + n_art

    if n_art:
        # phase one: maximize -(sum of artificials)
        obj = [Fraction(0)] * width
        val = [Fraction(0)]
        for r in art_rows:
            for j in range(n_struct):
                obj[j] += rows[r][j]
            val[0] -= rhs[r]
        tab.run(obj, val, n_struct)
        if val[0] != 0:
            return LPResult(INFEASIBLE, None, None, pivots=tab.pivots)
        # drive remaining artificials out of the basis
        r = 0
        while r < len(tab.rows):
            if tab.basis[r] >= n_struct:
                pc = next((j for j in range(n_struct) if tab.rows[r][j] != 0), None)
                if pc is None:
                    del tab.rows[r]
                    del tab.rhs[r]
                    del tab.basis[r]
                    continue
                tab.pivot(r, pc, [Fraction(0)] * width, [Fraction(0)])
            r += 1
        for row in tab.rows:
            del row[n_struct:]

    cf = [Fraction(x) for x in c] + [Fraction(0)] * n_slack
    obj = cf[:]
    val = [Fraction(0)]
    for r, bvar in enumerate(tab.basis):
        cb = cf[bvar]
        if cb:
            row = tab.rows[r]
            for j in range(n_struct):
                if row[j]:
                    obj[j] -= cb * row[j]
            val[0] += cb * tab.rhs[r]
    status = tab.run(obj, val, n_struct)
    if status == UNBOUNDED:
        return LPResult(UNBOUNDED, None, None, pivots=tab.pivots)
    x = [Fraction(0)] * n_struct
    for r, bvar in enumerate(tab.basis):
        x[bvar] = tab.rhs[r]
    return LPResult(OPTIMAL, tuple(x[:n]), val[0], tuple(tab.basis), tab.pivots)
