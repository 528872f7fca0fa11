"""Variable universe for parameters (n, d), the total differentiation
operator, the n+1 defining equations of the vertical jet space in the affine
chart (built by two independent routes), and certified sample points.

Conventions: coordinates z_1..z_{n+1}; hypersurface coefficients a_alpha for
|alpha| <= d excluding the normalized slot alpha = (d,0,...,0), which is the
constant 1; jet coordinates z_i^(lam) for 1 <= lam <= n.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Sequence

from .algebra import (
    COORD,
    JET,
    Polynomial,
    Variable,
    coeff,
    coord,
    enumerate_exponents,
    falling_factorial,
    jet,
    mi_total,
    rank_rational,
    solve_linear_exact,
    unit_index,
    var_name,
)


@dataclass(frozen=True)
class JetContext:
    """Parameters (n, d) with d > n, plus derived variable bookkeeping."""

    n: int
    d: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("jet order n must be >= 1")
        if self.d <= self.n:
            raise ValueError(f"degree d must exceed the jet order n (got n={self.n}, d={self.d})")

    @property
    def nvars(self) -> int:
        return self.n + 1

    @property
    def normalized_exponent(self) -> tuple:
        """The slot (d, 0, ..., 0) whose coefficient is the constant 1."""
        e = [0] * self.nvars
        e[0] = self.d
        return tuple(e)

    @property
    def coeff_exponents(self) -> tuple:
        return _coeff_exponents(self)

    @property
    def num_coeffs(self) -> int:
        return math.comb(self.nvars + self.d, self.d) - 1

    @property
    def coord_vars(self) -> tuple:
        return tuple(coord(i) for i in range(1, self.nvars + 1))

    @property
    def jet_vars(self) -> tuple:
        return tuple(
            jet(i, lam) for lam in range(1, self.n + 1) for i in range(1, self.nvars + 1)
        )

    @property
    def coeff_vars(self) -> tuple:
        return tuple(coeff(a) for a in self.coeff_exponents)

    @property
    def ambient_variables(self) -> tuple:
        """Coordinates, then coefficients, then jets grouped by order."""
        return self.coord_vars + self.coeff_vars + self.jet_vars

    @property
    def ambient_dimension(self) -> int:
        return (self.nvars) + self.num_coeffs + self.n * self.nvars

    def coeff_var(self, alpha: Sequence[int]) -> Variable:
        alpha = tuple(alpha)
        if len(alpha) != self.nvars or any(e < 0 for e in alpha):
            raise ValueError(f"bad exponent vector {alpha}")
        if mi_total(alpha) > self.d:
            raise ValueError(f"|{alpha}| exceeds the degree {self.d}")
        if alpha == self.normalized_exponent:
            raise ValueError("the normalized coefficient slot is the constant 1, not a variable")
        return coeff(alpha)

    def coeff_poly(self, alpha: Sequence[int]) -> Polynomial:
        """a_alpha as a polynomial; the normalized slot yields the constant 1."""
        alpha = tuple(alpha)
        if alpha == self.normalized_exponent:
            return Polynomial.const(1)
        return Polynomial.var(self.coeff_var(alpha))

    def monomial_z(self, alpha: Sequence[int]) -> Polynomial:
        return Polynomial.monomial(
            ((coord(i + 1), e) for i, e in enumerate(alpha) if e), 1
        )


@lru_cache(maxsize=None)
def _coeff_exponents(ctx: JetContext) -> tuple:
    exps = enumerate_exponents(ctx.nvars, ctx.d)
    return tuple(a for a in exps if a != ctx.normalized_exponent)


def total_derivative(p: Polynomial, ctx: JetContext) -> Polynomial:
    """Apply the total differentiation operator: z_k^(lam) -> z_k^(lam+1),
    with coordinates counting as order-0 jets.  Inputs touching order-n jets
    are rejected, since the result would leave the order-n universe."""
    out: dict = {}
    n = ctx.n
    for m, c in p.terms.items():
        for idx, (v, e) in enumerate(m):
            kind = v[0]
            if kind == COORD:
                succ = jet(v[1], 1)
            elif kind == JET:
                if v[2] >= n:
                    raise ValueError(
                        f"total derivative of {var_name(v)} leaves the order-{n} jet space"
                    )
                succ = jet(v[1], v[2] + 1)
            else:
                continue
            if e == 1:
                base = m[:idx] + m[idx + 1:]
            else:
                base = m[:idx] + ((v, e - 1),) + m[idx + 1:]
            # merge the successor variable into the monomial
            nm = dict(base)
            nm[succ] = nm.get(succ, 0) + 1
            key = tuple(sorted(nm.items()))
            s = out.get(key, 0) + c * e
            if s:
                out[key] = s
            else:
                del out[key]
    q = Polynomial()
    q.terms = out
    return q


def iterated_total_derivative(p: Polynomial, order: int, ctx: JetContext) -> Polynomial:
    for _ in range(order):
        p = total_derivative(p, ctx)
    return p


@lru_cache(maxsize=None)
def universal_polynomial(ctx: JetContext) -> Polynomial:
    """z_1^d + sum of a_alpha z^alpha over all coefficient slots."""
    p = Polynomial.monomial([(coord(1), ctx.d)], 1)
    for alpha in ctx.coeff_exponents:
        p = p + Polynomial.monomial(
            [(ctx.coeff_var(alpha), 1)] + [(coord(i + 1), e) for i, e in enumerate(alpha) if e],
            1,
        )
    return p


@lru_cache(maxsize=None)
def defining_equations_iterated(ctx: JetContext) -> tuple:
    """E_0 and its first n total derivatives."""
    eqs = [universal_polynomial(ctx)]
    for _ in range(ctx.n):
        eqs.append(total_derivative(eqs[-1], ctx))
    return tuple(eqs)


def jet_weight_partitions(kappa: int):
    """All (orders, multiplicities) with distinct orders l_1 < ... < l_e,
    multiplicities >= 1 and sum(l_i * m_i) = kappa."""
    out = []

    def rec(min_order: int, remaining: int, orders: list, mults: list):
        if remaining == 0:
            out.append((tuple(orders), tuple(mults)))
            return
        for lam in range(min_order, remaining + 1):
            max_mult = remaining // lam
            for mu in range(1, max_mult + 1):
                orders.append(lam)
                mults.append(mu)
                rec(lam + 1, remaining - lam * mu, orders, mults)
                orders.pop()
                mults.pop()

    rec(1, kappa, [], [])
    return out


def partition_coefficient(kappa: int, orders: Sequence[int], mults: Sequence[int]) -> int:
    """kappa! / prod((l_i!)^(m_i) * m_i!)."""
    denom = 1
    for lam, mu in zip(orders, mults):
        denom *= math.factorial(lam) ** mu * math.factorial(mu)
    return math.factorial(kappa) // denom


def _monomial_derivative_coeff(alpha: Sequence[int], counts: Mapping[int, int]) -> int:
    """Falling-factorial coefficient of the mixed partial of z^alpha with
    counts[j] derivatives in z_j; zero when differentiated below degree."""
    c = 1
    for j, k in counts.items():
        c *= falling_factorial(alpha[j - 1], k)
        if c == 0:
            return 0
    return c


@lru_cache(maxsize=None)
def defining_equations_partition_sum(ctx: JetContext) -> tuple:
    """The same equations assembled from the closed higher-order chain-rule
    sum over jet-weight partitions; independent of the iterated route."""
    from itertools import combinations_with_replacement

    nvars = ctx.nvars
    all_alphas = list(ctx.coeff_exponents) + [ctx.normalized_exponent]
    eqs = [universal_polynomial(ctx)]
    for kappa in range(1, ctx.n + 1):
        terms: dict = {}
        shapes = jet_weight_partitions(kappa)
        for alpha in all_alphas:
            avar = None if alpha == ctx.normalized_exponent else ctx.coeff_var(alpha)
            support = [j for j in range(1, nvars + 1) if alpha[j - 1] > 0]
            for orders, mults in shapes:
                base = partition_coefficient(kappa, orders, mults)
                # choose a coordinate multiset for each derivative-order block
                def assign(block: int, counts: dict, jet_pairs: list, tuple_count: int):
                    if block == len(orders):
                        dcoeff = _monomial_derivative_coeff(alpha, counts)
                        if dcoeff == 0:
                            return
                        rem = list(alpha)
                        for j, k in counts.items():
                            rem[j - 1] -= k
                        pairs = [(coord(j), e) for j, e in enumerate(rem, start=1) if e]
                        if avar is not None:
                            pairs.append((avar, 1))
                        mono_map: dict = dict(pairs)
                        for jv, je in jet_pairs:
                            mono_map[jv] = mono_map.get(jv, 0) + je
                        key = tuple(sorted(mono_map.items()))
                        val = terms.get(key, 0) + base * tuple_count * dcoeff
                        if val:
                            terms[key] = val
                        else:
                            del terms[key]
                        return
                    lam, mu = orders[block], mults[block]
                    for combo in combinations_with_replacement(support, mu):
                        cnt: dict = {}
                        for j in combo:
                            cnt[j] = cnt.get(j, 0) + 1
                        ways = math.factorial(mu)
                        for k in cnt.values():
                            ways //= math.factorial(k)
                        new_counts = dict(counts)
                        for j, k in cnt.items():
                            new_counts[j] = new_counts.get(j, 0) + k
                        new_jets = jet_pairs + [(jet(j, lam), k) for j, k in cnt.items()]
                        assign(block + 1, new_counts, new_jets, tuple_count * ways)

                assign(0, {}, [], 1)
        p = Polynomial()
        p.terms = terms
        eqs.append(p)
    return tuple(eqs)


@dataclass(frozen=True)
class JetPoint:
    """Exact rational assignment to every ambient variable; constructed points
    are certified to satisfy all defining equations."""

    assignment: dict
    chart: int | None = None

    def value(self, v: Variable) -> Fraction:
        return self.assignment[v]

    def to_json(self) -> str:
        data = {var_name(v): str(Fraction(val)) for v, val in sorted(self.assignment.items())}
        if self.chart is not None:
            data["_chart"] = str(self.chart)
        return json.dumps(data, sort_keys=True)


def random_rational(rng: random.Random, nonzero: bool = False) -> Fraction:
    while True:
        q = Fraction(rng.randint(-20, 20), rng.randint(1, 5))
        if q != 0 or not nonzero:
            return q


def sample_vertical_jet(
    ctx: JetContext,
    chart: int = 1,
    rng: random.Random | int | None = None,
) -> JetPoint:
    """Draw a random point of the vertical jet space over the open set
    z_chart' != 0: coordinates, jets and free coefficients are random
    rationals; the chain a_0, a_{e_i}, ..., a_{n e_i} is solved exactly from
    the defining equations (the power-jet system is invertible there)."""
    if not 1 <= chart <= ctx.nvars:
        raise ValueError(f"chart must lie in 1..{ctx.nvars}")
    if rng is None or isinstance(rng, int):
        rng = random.Random(rng)
    assignment: dict = {}
    for v in ctx.coord_vars:
        assignment[v] = random_rational(rng)
    for v in ctx.jet_vars:
        assignment[v] = random_rational(rng)
    assignment[jet(chart, 1)] = random_rational(rng, nonzero=True)

    solved = [tuple(k * e for e in unit_index(ctx.nvars, chart)) for k in range(1, ctx.n + 1)]
    zero_alpha = (0,) * ctx.nvars
    for alpha in ctx.coeff_exponents:
        if alpha != zero_alpha and alpha not in solved:
            assignment[ctx.coeff_var(alpha)] = random_rational(rng)

    eqs = defining_equations_iterated(ctx)
    # last n equations are linear in the solved chain with the power-jet matrix
    partial = dict(assignment)
    partial[ctx.coeff_var(zero_alpha)] = Fraction(0)
    for alpha in solved:
        partial[ctx.coeff_var(alpha)] = Fraction(0)
    power_polys = {
        (k, kap): iterated_total_derivative(
            Polynomial.var(coord(chart)) ** k, kap, ctx
        )
        for k in range(1, ctx.n + 1)
        for kap in range(1, ctx.n + 1)
    }
    matrix = [
        [power_polys[(k, kap)].evaluate(partial) for k in range(1, ctx.n + 1)]
        for kap in range(1, ctx.n + 1)
    ]
    rhs = [-Fraction(eqs[kap].evaluate(partial)) for kap in range(1, ctx.n + 1)]
    solution = solve_linear_exact(matrix, rhs)
    for alpha, val in zip(solved, solution):
        assignment[ctx.coeff_var(alpha)] = Fraction(val.constant_value())
    partial.update({ctx.coeff_var(a): assignment[ctx.coeff_var(a)] for a in solved})
    assignment[ctx.coeff_var(zero_alpha)] = -Fraction(eqs[0].evaluate(partial))

    point = JetPoint(assignment=assignment, chart=chart)
    residues = [eqs[kap].evaluate(assignment) for kap in range(ctx.n + 1)]
    if any(r != 0 for r in residues):
        raise RuntimeError(f"sampled point fails certification: residues {residues}")
    return point


def first_jets_all_zero(point: JetPoint, ctx: JetContext) -> bool:
    """Membership in the locus where every first-order jet vanishes."""
    return all(point.value(jet(i, 1)) == 0 for i in range(1, ctx.nvars + 1))


def jet_matrix_rank(point: JetPoint, ctx: JetContext) -> int:
    rows = [
        [point.value(jet(i, lam)) for lam in range(1, ctx.n + 1)]
        for i in range(1, ctx.nvars + 1)
    ]
    return rank_rational(rows)


def wronskians_all_zero(point: JetPoint, ctx: JetContext) -> bool:
    """Membership in the locus where all n x n minors of the (n+1) x n jet
    matrix vanish, i.e. the jet matrix has rank < n."""
    return jet_matrix_rank(point, ctx) < ctx.n


def jacobian_matrix_at(point: JetPoint, ctx: JetContext, eqs: Sequence[Polynomial] | None = None):
    if eqs is None:
        eqs = defining_equations_iterated(ctx)
    rows = []
    for eq in eqs:
        row = []
        for v in ctx.ambient_variables:
            dp = eq.diff(v)
            row.append(Fraction(dp.evaluate(point.assignment)) if not dp.is_zero() else Fraction(0))
        rows.append(row)
    return rows


def jacobian_rank_at(point: JetPoint, ctx: JetContext, eqs: Sequence[Polynomial] | None = None) -> int:
    """Rank over Q of the (n+1) x ambient Jacobian of the defining equations."""
    return rank_rational(jacobian_matrix_at(point, ctx, eqs))
