"""The four families of tangent vector fields on the vertical jet space and
their build-time tangency certificates.

* coefficient fields: move only hypersurface coefficients of length <= n,
  with Cramer-determinant coefficients (two variants);
* shifted coefficient fields: translation-like combinations spanning the
  coefficient directions of length >= n+1;
* coordinate fields: one coordinate direction plus the induced coefficient
  drift, commuting with total differentiation;
* jet-linear fields: a matrix acting on all jet columns at once, with
  coefficient corrections solved from a block-triangular linear system.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations_with_replacement, product
from typing import Sequence

from .algebra import (
    Polynomial,
    VectorField,
    binomial_product,
    coord,
    determinant,
    enumerate_exponents,
    falling_factorial,
    jet,
    mat,
    mi_leq,
    mi_sub,
    mi_total,
    solve_linear_exact,
    unit_index,
)
from .jetspace import JetContext
from .wronskian import (
    VARIANT_POWER,
    cramer_coefficients,
    excluded_exponents,
)


@dataclass(frozen=True)
class FrameField:
    kind: str  # coefficient | shifted_coefficient | coordinate | jet_linear
    label: str
    field: VectorField

    def apply(self, p: Polynomial) -> Polynomial:
        return self.field.apply(p)

    def to_text(self) -> str:
        return f"{self.label}\n{self.field.to_text()}"


def coefficient_field(
    variant: int, alpha, ctx: JetContext, chart: int | None = None
) -> FrameField:
    """Field scaled by the system determinant in the alpha direction, with the
    solved coefficient slots corrected so that every defining equation is
    annihilated identically."""
    alpha = tuple(alpha)
    coeffs = cramer_coefficients(variant, alpha, ctx, chart)
    directions = {ctx.coeff_var(alpha): coeffs.scale}
    zero_alpha = (0,) * ctx.nvars
    solved = [zero_alpha]
    if variant == VARIANT_POWER:
        solved += [tuple(k * e for e in unit_index(ctx.nvars, chart)) for k in range(1, ctx.n + 1)]
        label = f"coeff[v1,chart={chart},a={alpha}]"
    else:
        solved += [unit_index(ctx.nvars, k) for k in range(1, ctx.n + 1)]
        label = f"coeff[v2,a={alpha}]"
    for slot, bk in zip(solved, coeffs.b):
        directions[ctx.coeff_var(slot)] = directions.get(ctx.coeff_var(slot), Polynomial.zero()) - bk
    return FrameField(kind="coefficient", label=label, field=VectorField(directions))


def admissible_coefficient_exponents(variant: int, ctx: JetContext, chart: int | None = None):
    excl = excluded_exponents(variant, ctx, chart)
    return [a for a in enumerate_exponents(ctx.nvars, ctx.n) if a not in excl]


def canonical_shift_budget(alpha, ctx: JetContext) -> tuple:
    """Greedy choice of a shift vector ell <= alpha with |ell| = n + 1, filling
    from the first coordinate; well defined whenever |alpha| >= n + 1."""
    alpha = tuple(alpha)
    if mi_total(alpha) < ctx.n + 1:
        raise ValueError("shift fields require |alpha| >= n + 1")
    remaining = ctx.n + 1
    ell = []
    for a in alpha:
        take = min(a, remaining)
        ell.append(take)
        remaining -= take
    return tuple(ell)


def shifted_coefficient_field(alpha, ell, ctx: JetContext) -> FrameField:
    """Signed multinomial combination of coefficient directions a_{alpha - s}
    weighted by the monomials z^s over all splittings s <= ell."""
    alpha, ell = tuple(alpha), tuple(ell)
    if mi_total(ell) != ctx.n + 1:
        raise ValueError("|ell| must equal n + 1")
    if not mi_leq(ell, alpha):
        raise ValueError("ell must be componentwise <= alpha")
    if mi_total(alpha) > ctx.d or alpha[0] >= ctx.d:
        raise ValueError("alpha out of range")
    directions = {}
    for sub in product(*(range(l + 1) for l in ell)):
        sign = -1 if sum(sub) % 2 else 1
        c = sign * binomial_product(ell, sub)
        target = ctx.coeff_var(mi_sub(alpha, sub))
        directions[target] = Polynomial.monomial(
            ((coord(j + 1), e) for j, e in enumerate(sub) if e), c
        )
    return FrameField(
        kind="shifted_coefficient",
        label=f"shift[a={alpha},l={ell}]",
        field=VectorField(directions),
    )


def shift_split_identity(alpha, ell, js: Sequence[int], e1: int, ctx: JetContext) -> Polynomial:
    """The split sum over s <= ell of
    (-1)^{|s|} (ell choose s)  d^{e1}(z^{alpha-s})/dz_{j_1..j_{e1}} *
    d^{e-e1}(z^s)/dz_{j_{e1+1}..j_e};
    identically zero for every derivative count e <= n and every splitting."""
    alpha, ell = tuple(alpha), tuple(ell)
    total = Polynomial.zero()
    first, second = js[:e1], js[e1:]
    for sub in product(*(range(l + 1) for l in ell)):
        sign = -1 if sum(sub) % 2 else 1
        c = sign * binomial_product(ell, sub)
        p1 = ctx.monomial_z(mi_sub(alpha, sub))
        for j in first:
            p1 = p1.diff(coord(j))
        p2 = ctx.monomial_z(sub)
        for j in second:
            p2 = p2.diff(coord(j))
        total = total + c * p1 * p2
    return total


def coordinate_field(i: int, ctx: JetContext) -> FrameField:
    """One coordinate direction corrected by the induced drift on the
    coefficients; commutes with total differentiation."""
    if not 1 <= i <= ctx.nvars:
        raise ValueError(f"coordinate index must lie in 1..{ctx.nvars}")
    directions = {coord(i): Polynomial.const(1)}
    ei = unit_index(ctx.nvars, i)
    for alpha in enumerate_exponents(ctx.nvars, ctx.d - 1):
        shifted = tuple(a + e for a, e in zip(alpha, ei))
        directions[ctx.coeff_var(alpha)] = -(alpha[i - 1] + 1) * ctx.coeff_poly(shifted)
    return FrameField(kind="coordinate", label=f"coord[{i}]", field=VectorField(directions))


# -- jet-linear fields ---------------------------------------------------------


class JetFieldTable:
    """Solved coefficient table for a jet-linear field: entries are bilinear
    in (coefficients, matrix entries); zero outside the stored support."""

    def __init__(self, ctx: JetContext, entries: dict, top_factor: Polynomial, block_dets: dict):
        self.ctx = ctx
        self.entries = entries  # (alpha, beta) -> Polynomial
        self.top_factor = top_factor  # quotient of the order-0 tangency by E_0
        self.block_dets = block_dets  # rho -> integer determinant of the block

    def get(self, alpha, beta) -> Polynomial:
        return self.entries.get((tuple(alpha), tuple(beta)), Polynomial.zero())

    def coefficient_direction(self, alpha) -> Polynomial:
        """A_alpha as a polynomial in z (and coefficients / matrix entries)."""
        alpha = tuple(alpha)
        total = Polynomial.zero()
        for beta in enumerate_exponents(self.ctx.nvars, self.ctx.n):
            entry = self.entries.get((alpha, beta))
            if entry is not None and not entry.is_zero():
                total = total + entry * self.ctx.monomial_z(beta)
        return total

    def substitute_matrix(self, linear_map) -> "JetFieldTable":
        binds = {
            mat(k, l): Fraction(linear_map[k - 1][l - 1])
            for k in range(1, self.ctx.nvars + 1)
            for l in range(1, self.ctx.nvars + 1)
        }
        entries = {}
        for key, val in self.entries.items():
            sub = val.subs(binds)
            if not sub.is_zero():
                entries[key] = sub
        return JetFieldTable(
            self.ctx, entries, self.top_factor.subs(binds), dict(self.block_dets)
        )


def _matrix_entry_poly(linear_map, k: int, l: int) -> Polynomial:
    if linear_map is None:
        return Polynomial.var(mat(k, l))
    return Polynomial.const(Fraction(linear_map[k - 1][l - 1]))


def _counts(js: Sequence[int], nvars: int) -> tuple:
    c = [0] * nvars
    for j in js:
        c[j - 1] += 1
    return tuple(c)


def _remainder(rho, js, linear_map, ctx: JetContext) -> Polynomial:
    """Bilinear remainder of the derivative equation indexed by the multiset
    js at the monomial z^{rho - sum e_j}: the matrix-transport of the ambient
    equation, coefficient-extracted in closed form."""
    nvars = ctx.nvars
    total = Polynomial.zero()
    for m in range(len(js)):
        jm = js[m]
        for l in range(1, nvars + 1):
            gamma = list(rho)
            gamma[jm - 1] -= 1
            gamma[l - 1] += 1
            if gamma[jm - 1] < 0:
                continue
            gamma_t = tuple(gamma)
            replaced = js[:m] + (l,) + js[m + 1:]
            c = 1
            for j, cnt in enumerate(_counts(replaced, nvars), start=1):
                if cnt:
                    c *= falling_factorial(gamma_t[j - 1], cnt)
                    if c == 0:
                        break
            if c == 0:
                continue
            total = total + c * ctx.coeff_poly(gamma_t) * _matrix_entry_poly(linear_map, l, jm)
    return total


def solve_jet_field_coefficients(ctx: JetContext, linear_map=None) -> JetFieldTable:
    """Solve, block by block in the total monomial index rho, the square linear
    systems determining the coefficient corrections of a jet-linear field.

    With linear_map=None the matrix entries stay symbolic and every solved
    entry is bilinear in (coefficients, matrix entries).  Each block must be
    uniquely solvable; a singular block is a hard failure."""
    if linear_map is None:
        table = _solve_symbolic_table(ctx)
        return JetFieldTable(ctx, dict(table.entries), table.top_factor, dict(table.block_dets))
    return _solve_symbolic_table(ctx).substitute_matrix(linear_map)


@lru_cache(maxsize=None)
def _solve_symbolic_table(ctx: JetContext) -> JetFieldTable:
    nvars = ctx.nvars
    top_rho = ctx.normalized_exponent
    entries: dict = {}
    block_dets: dict = {}
    top_factor = Polynomial.zero()

    rhos = [top_rho] + [r for r in enumerate_exponents(nvars, ctx.d) if r != top_rho]
    for rho in rhos:
        unknowns = [
            beta
            for beta in enumerate_exponents(nvars, ctx.n)
            if mi_leq(beta, rho) and rho[0] - beta[0] < ctx.d
        ]
        if not unknowns:
            continue
        rows = []
        rhs = []
        if rho[0] < ctx.d:
            rows.append([1] * len(unknowns))
            rhs.append(ctx.coeff_poly(rho) * top_factor)  # moved to the right-hand side
        for e in range(1, ctx.n + 1):
            for js in combinations_with_replacement(range(1, nvars + 1), e):
                sigma = _counts(js, nvars)
                if not mi_leq(sigma, rho):
                    continue
                row = []
                for beta in unknowns:
                    alpha = mi_sub(rho, beta)
                    c = 1
                    for j in range(nvars):
                        if sigma[j]:
                            c *= falling_factorial(alpha[j], sigma[j])
                            if c == 0:
                                break
                    row.append(c)
                rows.append(row)
                rhs.append(-_remainder(rho, js, None, ctx))
        if len(rows) != len(unknowns):
            raise RuntimeError(
                f"block {rho}: {len(rows)} equations for {len(unknowns)} unknowns"
            )
        det = determinant([[Fraction(x) for x in row] for row in rows]).constant_value()
        block_dets[rho] = det
        solution = solve_linear_exact(rows, rhs)
        for beta, val in zip(unknowns, solution):
            alpha = mi_sub(rho, beta)
            if not val.is_zero():
                entries[(alpha, beta)] = val
        if rho == top_rho:
            top_factor = Polynomial.zero()
            for beta in unknowns:
                alpha = mi_sub(rho, beta)
                top_factor = top_factor + entries.get((alpha, beta), Polynomial.zero())
    return JetFieldTable(ctx, entries, top_factor, block_dets)


def jet_linear_field(linear_map, ctx: JetContext, table: JetFieldTable | None = None) -> FrameField:
    """Field whose jet coordinates move by the given matrix applied to every
    jet column, corrected in the coefficient directions so that tangency holds
    on the variety (order 0 reproduces a multiple of the defining polynomial,
    all higher orders are annihilated identically)."""
    if table is None:
        table = solve_jet_field_coefficients(ctx, linear_map)
    directions: dict = {}
    for k in range(1, ctx.nvars + 1):
        for lam in range(1, ctx.n + 1):
            total = Polynomial.zero()
            for l in range(1, ctx.nvars + 1):
                total = total + _matrix_entry_poly(linear_map, k, l) * Polynomial.var(jet(l, lam))
            directions[jet(k, lam)] = total
    for alpha in ctx.coeff_exponents:
        a_dir = table.coefficient_direction(alpha)
        if not a_dir.is_zero():
            directions[ctx.coeff_var(alpha)] = a_dir
    label = "jet[symbolic]" if linear_map is None else f"jet[{_matrix_label(linear_map)}]"
    return FrameField(kind="jet_linear", label=label, field=VectorField(directions))


def _matrix_label(linear_map) -> str:
    return ";".join(",".join(str(Fraction(x)) for x in row) for row in linear_map)


def elementary_matrix(k: int, l: int, size: int):
    return [[1 if (r == k - 1 and c == l - 1) else 0 for c in range(size)] for r in range(size)]


def enumerate_frame(ctx: JetContext, chart: int = 1, variant: int = VARIANT_POWER) -> list:
    """The full candidate frame, deterministically ordered: all admissible
    coefficient fields, one canonical shifted field per long exponent, every
    coordinate field, and one jet-linear field per elementary matrix."""
    fields = []
    chart_arg = chart if variant == VARIANT_POWER else None
    for alpha in admissible_coefficient_exponents(variant, ctx, chart_arg):
        fields.append(coefficient_field(variant, alpha, ctx, chart_arg))
    for alpha in enumerate_exponents(ctx.nvars, ctx.d):
        if ctx.n + 1 <= mi_total(alpha) <= ctx.d and alpha[0] < ctx.d:
            ell = canonical_shift_budget(alpha, ctx)
            fields.append(shifted_coefficient_field(alpha, ell, ctx))
    for i in range(1, ctx.nvars + 1):
        fields.append(coordinate_field(i, ctx))
    symbolic = solve_jet_field_coefficients(ctx)
    for k in range(1, ctx.nvars + 1):
        for l in range(1, ctx.nvars + 1):
            m = elementary_matrix(k, l, ctx.nvars)
            fields.append(jet_linear_field(m, ctx, table=symbolic.substitute_matrix(m)))
    return fields
