"""Exact arithmetic substrate: tagged variables, sparse multivariate
polynomials over the rationals, derivations, and fraction-free linear algebra.

A variable is a small tuple ``(kind, *indices)``.  Kinds are ordered
(coordinates < jets < coefficients < matrix entries < reparametrization jets)
and indices are ints, so plain tuple comparison gives one global variable
order and every polynomial has a canonical dictionary form: equal dicts mean
equal polynomials.

Coefficients are kept as ``int`` whenever the value is integral and promoted
to ``fractions.Fraction`` otherwise; the two compare and hash equal, so
canonical form is unaffected.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence, Union

Scalar = Union[int, Fraction]

# Variable kinds, in canonical sort order.
COORD, JET, COEFF, MAT, PHI = range(5)

Variable = tuple


def coord(i: int) -> Variable:
    """The i-th affine coordinate z_i (1-based)."""
    return (COORD, i)


def jet(i: int, order: int) -> Variable:
    """The order-th derivative coordinate of z_i; order >= 1."""
    if order < 1:
        raise ValueError("jet order must be >= 1 (order 0 is the coordinate itself)")
    return (JET, i, order)


def coeff(alpha: Sequence[int]) -> Variable:
    """The hypersurface coefficient variable indexed by the exponent vector alpha."""
    return (COEFF,) + tuple(alpha)


def mat(k: int, l: int) -> Variable:
    """Entry (k, l) of the square matrix acting on the jet columns."""
    return (MAT, k, l)


def phi(k: int) -> Variable:
    """k-th derivative of a source reparametrization at the origin."""
    return (PHI, k)


def var_kind(v: Variable) -> int:
    return v[0]


def coeff_exponent(v: Variable) -> tuple:
    return v[1:]


def var_name(v: Variable) -> str:
    """Deterministic display name, also used in JSON reports."""
    kind = v[0]
    if kind == COORD:
        return f"z{v[1]}"
    if kind == JET:
        order = v[2]
        if order <= 3:
            return f"z{v[1]}" + "'" * order
        return f"z{v[1]}^({order})"
    if kind == COEFF:
        return "a(" + ",".join(str(e) for e in v[1:]) + ")"
    if kind == MAT:
        return f"m({v[1]},{v[2]})"
    if kind == PHI:
        return f"phi{v[1]}"
    raise ValueError(f"unknown variable {v!r}")


def _norm_scalar(c):
    if isinstance(c, Fraction) and c.denominator == 1:
        return int(c)
    return c


# A monomial is a tuple of (variable, exponent) pairs, sorted by variable,
# exponents > 0.  The empty tuple is the constant monomial.
Monomial = tuple

_ONE_MONO: Monomial = ()


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    out = []
    i = j = 0
    la, lb = len(a), len(b)
    while i < la and j < lb:
        va, ea = a[i]
        vb, eb = b[j]
        if va == vb:
            out.append((va, ea + eb))
            i += 1
            j += 1
        elif va < vb:
            out.append(a[i])
            i += 1
        else:
            out.append(b[j])
            j += 1
    out.extend(a[i:])
    out.extend(b[j:])
    return tuple(out)


def _mono_div(a: Monomial, b: Monomial):
    """a / b as a monomial, or None when b does not divide a."""
    rem = dict(a)
    for v, e in b:
        have = rem.get(v, 0)
        if have < e:
            return None
        if have == e:
            del rem[v]
        else:
            rem[v] = have - e
    return tuple(sorted(rem.items()))


def _mono_key(m: Monomial):
    # graded order first, then lexicographic on the (variable, exponent) pairs
    return (sum(e for _, e in m), m)


def _glex_key(m: Monomial):
    # proper graded-lex monomial order (earlier variables have priority);
    # the *minimum* of this key over the support is the leading monomial
    return (-sum(e for _, e in m), tuple((v, -e) for v, e in m))


class Polynomial:
    """Sparse polynomial: dict from canonical monomials to nonzero scalars."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Monomial, Scalar] | None = None):
        if terms:
            self.terms = {m: _norm_scalar(c) for m, c in terms.items() if c != 0}
        else:
            self.terms = {}

    # -- constructors -------------------------------------------------------

    @staticmethod
    def zero() -> "Polynomial":
        return Polynomial()

    @staticmethod
    def const(c: Scalar) -> "Polynomial":
        p = Polynomial()
        if c != 0:
            p.terms[_ONE_MONO] = _norm_scalar(c)
        return p

    @staticmethod
    def var(v: Variable, exp: int = 1, c: Scalar = 1) -> "Polynomial":
        if exp < 0:
            raise ValueError("negative exponent")
        if exp == 0:
            return Polynomial.const(c)
        p = Polynomial()
        if c != 0:
            p.terms[((v, exp),)] = _norm_scalar(c)
        return p

    @staticmethod
    def monomial(pairs: Iterable[tuple[Variable, int]], c: Scalar = 1) -> "Polynomial":
        mono = tuple(sorted((v, e) for v, e in pairs if e != 0))
        p = Polynomial()
        if c != 0:
            p.terms[mono] = _norm_scalar(c)
        return p

    # -- queries -------------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and _ONE_MONO in self.terms)

    def constant_value(self) -> Scalar:
        if self.is_zero():
            return 0
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return self.terms[_ONE_MONO]

    def variables(self) -> set:
        out = set()
        for m in self.terms:
            for v, _ in m:
                out.add(v)
        return out

    def total_degree(self) -> int:
        if not self.terms:
            return 0
        return max(sum(e for _, e in m) for m in self.terms)

    def coefficient(self, mono: Monomial) -> Scalar:
        return self.terms.get(mono, 0)

    def __eq__(self, other) -> bool:
        if isinstance(other, Polynomial):
            return self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.terms == Polynomial.const(other).terms
        return NotImplemented

    __hash__ = None  # mutable dict inside; polynomials are not dict keys

    # -- ring operations -----------------------------------------------------

    def __add__(self, other) -> "Polynomial":
        other = _as_poly(other)
        if not self.terms:
            return other
        if not other.terms:
            return self
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m, 0) + c
            if s:
                out[m] = _norm_scalar(s)
            else:
                out.pop(m, None)
        p = Polynomial()
        p.terms = out
        return p

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        p = Polynomial()
        p.terms = {m: -c for m, c in self.terms.items()}
        return p

    def __sub__(self, other) -> "Polynomial":
        return self + (-_as_poly(other))

    def __rsub__(self, other) -> "Polynomial":
        return _as_poly(other) + (-self)

    def __mul__(self, other) -> "Polynomial":
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return Polynomial()
            other = _norm_scalar(other)
            p = Polynomial()
            p.terms = {m: _norm_scalar(c * other) for m, c in self.terms.items()}
            return p
        if not isinstance(other, Polynomial):
            return NotImplemented
        if not self.terms or not other.terms:
            return Polynomial()
        out: dict = {}
        for ma, ca in self.terms.items():
            for mb, cb in other.terms.items():
                m = _mono_mul(ma, mb)
                s = out.get(m, 0) + ca * cb
                if s:
                    out[m] = s
                else:
                    del out[m]
        p = Polynomial()
        p.terms = {m: _norm_scalar(c) for m, c in out.items()}
        return p

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Polynomial":
        if not isinstance(n, int) or n < 0:
            raise ValueError("polynomial power requires a nonnegative integer exponent")
        result = Polynomial.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    # -- calculus ------------------------------------------------------------

    def diff(self, v: Variable) -> "Polynomial":
        """Formal partial derivative with respect to v."""
        out: dict = {}
        for m, c in self.terms.items():
            for idx, (w, e) in enumerate(m):
                if w == v:
                    if e == 1:
                        nm = m[:idx] + m[idx + 1:]
                    else:
                        nm = m[:idx] + ((w, e - 1),) + m[idx + 1:]
                    s = out.get(nm, 0) + c * e
                    if s:
                        out[nm] = s
                    else:
                        del out[nm]
                    break
                if w > v:
                    break
        p = Polynomial()
        p.terms = {m: _norm_scalar(c) for m, c in out.items()}
        return p

    def subs(self, bindings: Mapping[Variable, "Polynomial | Scalar"]) -> "Polynomial":
        """Simultaneous substitution; unbound variables pass through."""
        if not bindings:
            return self
        binds = {v: _as_poly(b) for v, b in bindings.items()}
        pow_cache: dict = {}
        acc = Polynomial()
        for m, c in self.terms.items():
            passthrough = []
            factors = []
            for v, e in m:
                b = binds.get(v)
                if b is None:
                    passthrough.append((v, e))
                else:
                    key = (v, e)
                    f = pow_cache.get(key)
                    if f is None:
                        f = b ** e
                        pow_cache[key] = f
                    factors.append(f)
            term = Polynomial.monomial(passthrough, c)
            for f in factors:
                term = term * f
            acc = acc + term
        return acc

    def evaluate(self, assignment: Mapping[Variable, Scalar]) -> Scalar:
        """Full numeric evaluation; every variable present must be bound."""
        total = 0
        pow_cache: dict = {}
        for m, c in self.terms.items():
            val = c
            for v, e in m:
                key = (v, e)
                pv = pow_cache.get(key)
                if pv is None:
                    pv = assignment[v] ** e
                    pow_cache[key] = pv
                val = val * pv
            total = total + val
        return _norm_scalar(total) if isinstance(total, Fraction) else total

    # -- exact division ------------------------------------------------------

    def exact_div(self, divisor: "Polynomial") -> "Polynomial":
        """Quotient self/divisor when division is exact; ValueError otherwise."""
        if divisor.is_zero():
            raise ZeroDivisionError("division by zero polynomial")
        if self.is_zero():
            return Polynomial()
        if divisor.is_constant():
            inv = Fraction(1, 1) / Fraction(divisor.constant_value())
            return self * inv
        if len(divisor.terms) == 1:
            # single-monomial divisor: divide term by term
            (dm, dc), = divisor.terms.items()
            out = {}
            for m, c in self.terms.items():
                q = _mono_div(m, dm)
                if q is None:
                    raise ValueError("not exactly divisible")
                out[q] = _norm_scalar(Fraction(c) / Fraction(dc))
            p = Polynomial()
            p.terms = {m: c for m, c in out.items() if c != 0}
            return p
        lead_d = min(divisor.terms, key=_glex_key)
        cd = divisor.terms[lead_d]
        rem = Polynomial()
        rem.terms = dict(self.terms)
        quot: dict = {}
        while rem.terms:
            lead_r = min(rem.terms, key=_glex_key)
            q = _mono_div(lead_r, lead_d)
            if q is None:
                raise ValueError("not exactly divisible")
            qc = _norm_scalar(Fraction(rem.terms[lead_r]) / Fraction(cd))
            quot[q] = qc
            rem = rem - Polynomial.monomial(q, qc) * divisor
        p = Polynomial()
        p.terms = {m: c for m, c in quot.items() if c != 0}
        return p

    def divisible_by(self, divisor: "Polynomial") -> bool:
        try:
            self.exact_div(divisor)
            return True
        except ValueError:
            return False

    # -- canonical text form ---------------------------------------------------

    def sorted_terms(self) -> list[tuple[Monomial, Scalar]]:
        return sorted(self.terms.items(), key=lambda item: _mono_key(item[0]))

    def to_text(self) -> str:
        """Canonical serialization: graded-lex sorted ``coeff * var^exp * ...``."""
        if not self.terms:
            return "0"
        parts = []
        for m, c in self.sorted_terms():
            factors = [str(c)]
            for v, e in m:
                factors.append(var_name(v) if e == 1 else f"{var_name(v)}^{e}")
            parts.append(" * ".join(factors))
        return " + ".join(parts)

    def __repr__(self) -> str:
        return f"Polynomial({self.to_text()})"


def _as_poly(x) -> Polynomial:
    if isinstance(x, Polynomial):
        return x
    if isinstance(x, (int, Fraction)):
        return Polynomial.const(x)
    raise TypeError(f"cannot coerce {type(x).__name__} to Polynomial")


ZERO = Polynomial.zero()
ONE = Polynomial.const(1)


class VectorField:
    """Derivation of the polynomial ring: finite map variable -> coefficient."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Mapping[Variable, Polynomial | Scalar] | None = None):
        self.coeffs = {}
        if coeffs:
            for v, c in coeffs.items():
                c = _as_poly(c)
                if not c.is_zero():
                    self.coeffs[v] = c

    def get(self, v: Variable) -> Polynomial:
        return self.coeffs.get(v, ZERO)

    def items(self) -> Iterator[tuple[Variable, Polynomial]]:
        return iter(self.coeffs.items())

    def apply(self, p: Polynomial) -> Polynomial:
        """Apply the derivation to p (linear, Leibniz by construction)."""
        out = Polynomial()
        for v, c in self.coeffs.items():
            dp = p.diff(v)
            if not dp.is_zero():
                out = out + c * dp
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, VectorField):
            return NotImplemented
        return self.coeffs == other.coeffs

    __hash__ = None

    def to_text(self) -> str:
        """Canonical serialization: one ``d/d<var>: <polynomial>`` line per
        nonzero direction, sorted by the global variable order."""
        return "\n".join(
            f"d/d{var_name(v)}: {c.to_text()}" for v, c in sorted(self.coeffs.items())
        )

    def __repr__(self) -> str:
        return f"VectorField({self.to_text().replace(chr(10), ', ')})"


# -- multi-index helpers ------------------------------------------------------


def mi_total(alpha: Sequence[int]) -> int:
    return sum(alpha)


def mi_add(alpha: Sequence[int], beta: Sequence[int]) -> tuple:
    return tuple(a + b for a, b in zip(alpha, beta))


def mi_sub(alpha: Sequence[int], beta: Sequence[int]) -> tuple:
    out = tuple(a - b for a, b in zip(alpha, beta))
    if any(e < 0 for e in out):
        raise ValueError(f"{beta} does not divide {alpha}")
    return out


def mi_leq(beta: Sequence[int], alpha: Sequence[int]) -> bool:
    """Componentwise beta <= alpha."""
    return all(b <= a for a, b in zip(alpha, beta))


def unit_index(nvars: int, i: int) -> tuple:
    """Basic multi-index with a single 1 in (1-based) slot i."""
    e = [0] * nvars
    e[i - 1] = 1
    return tuple(e)


def enumerate_exponents(nvars: int, max_total: int) -> list[tuple]:
    """All exponent vectors with total degree <= max_total, graded-lex sorted."""
    out: list[tuple] = []

    def rec(prefix: list, remaining: int, slots: int):
        if slots == 0:
            out.append(tuple(prefix))
            return
        for e in range(remaining + 1):
            prefix.append(e)
            rec(prefix, remaining - e, slots - 1)
            prefix.pop()

    rec([], max_total, nvars)
    out.sort(key=lambda a: (sum(a), a))
    return out


def falling_factorial(a: int, k: int) -> int:
    r = 1
    for j in range(k):
        r *= a - j
    return r


def binomial_product(ell: Sequence[int], sub: Sequence[int]) -> int:
    """prod_j C(ell_j, sub_j); the multinomial ell!/(sub! (ell-sub)!)."""
    r = 1
    for l, s in zip(ell, sub):
        r *= math.comb(l, s)
    return r


# -- linear algebra -----------------------------------------------------------


class LinearSolveError(Exception):
    pass


class InconsistentSystem(LinearSolveError):
    """The system has no solution."""


class UnderdeterminedSystem(LinearSolveError):
    """The solution is not unique on the requested unknowns."""


def det_cofactor(matrix: Sequence[Sequence]) -> Polynomial:
    """Naive cofactor expansion; reference implementation for cross-checks."""
    m = [[_as_poly(x) for x in row] for row in matrix]
    _require_square(m)
    return _det_cofactor(m)


def _det_cofactor(m) -> Polynomial:
    k = len(m)
    if k == 1:
        return m[0][0]
    if k == 2:
        return m[0][0] * m[1][1] - m[0][1] * m[1][0]
    total = Polynomial()
    sign = 1
    for j in range(k):
        a = m[0][j]
        if not a.is_zero():
            minor = [row[:j] + row[j + 1:] for row in m[1:]]
            total = total + sign * a * _det_cofactor(minor)
        sign = -sign
    return total


def det_bareiss(matrix: Sequence[Sequence]) -> Polynomial:
    """Fraction-free Bareiss elimination with exact polynomial division."""
    m = [[_as_poly(x) for x in row] for row in matrix]
    _require_square(m)
    k = len(m)
    if k == 1:
        return m[0][0]
    sign = 1
    prev = ONE
    for col in range(k - 1):
        pivot_row = None
        for r in range(col, k):
            if not m[r][col].is_zero():
                pivot_row = r
                break
        if pivot_row is None:
            return Polynomial()
        if pivot_row != col:
            m[col], m[pivot_row] = m[pivot_row], m[col]
            sign = -sign
        pivot = m[col][col]
        for r in range(col + 1, k):
            for c in range(col + 1, k):
                num = m[r][c] * pivot - m[r][col] * m[col][c]
                m[r][c] = num.exact_div(prev)
            m[r][col] = ZERO
        prev = pivot
    result = m[k - 1][k - 1]
    return result if sign == 1 else -result


def determinant(matrix: Sequence[Sequence]) -> Polynomial:
    """Exact symbolic determinant: cofactor below 5x5 (and for very sparse
    entries, where Bareiss' exact divisions dominate), Bareiss otherwise."""
    rows = [[_as_poly(x) for x in row] for row in matrix]
    _require_square(rows)
    if len(rows) < 5:
        return det_cofactor(rows)
    if all(len(x.terms) <= 2 for row in rows for x in row):
        return det_cofactor(rows)
    return det_bareiss(rows)


def _require_square(m) -> None:
    k = len(m)
    if k == 0 or any(len(row) != k for row in m):
        raise ValueError("determinant requires a nonempty square matrix")


def solve_linear_exact(matrix: Sequence[Sequence], rhs: Sequence):
    """Solve A x = b exactly over the rationals.

    Matrix entries must be rational scalars (constant polynomials accepted);
    right-hand entries may be scalars or polynomials.  Raises
    InconsistentSystem / UnderdeterminedSystem instead of approximating.
    """
    a = [[_to_fraction(x) for x in row] for row in matrix]
    b = [_as_poly(x) for x in rhs]
    nrows = len(a)
    if nrows != len(b):
        raise ValueError("matrix/rhs size mismatch")
    ncols = len(a[0]) if nrows else 0
    if any(len(row) != ncols for row in a):
        raise ValueError("ragged matrix")

    pivots: list[tuple[int, int]] = []
    row = 0
    for col in range(ncols):
        p = None
        for r in range(row, nrows):
            if a[r][col] != 0:
                p = r
                break
        if p is None:
            continue
        a[row], a[p] = a[p], a[row]
        b[row], b[p] = b[p], b[row]
        inv = Fraction(1, 1) / a[row][col]
        a[row] = [x * inv for x in a[row]]
        b[row] = b[row] * inv
        for r in range(nrows):
            if r != row and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[row])]
                b[r] = b[r] - f * b[row]
        pivots.append((row, col))
        row += 1
        if row == nrows:
            break
    for r in range(row, nrows):
        if not b[r].is_zero():
            raise InconsistentSystem(f"row {r} reduces to 0 = {b[r].to_text()}")
    if len(pivots) < ncols:
        raise UnderdeterminedSystem(
            f"rank {len(pivots)} < {ncols} unknowns: solution not unique"
        )
    x: list[Polynomial] = [ZERO] * ncols
    for r, c in pivots:
        x[c] = b[r]
    return x


def _to_fraction(x) -> Fraction:
    if isinstance(x, Polynomial):
        return Fraction(x.constant_value())
    return Fraction(x)


def rank_rational(matrix: Sequence[Sequence]) -> int:
    """Rank over Q via integer fraction-free (Bareiss) elimination."""
    rows = []
    for row in matrix:
        fr = [Fraction(x) if not isinstance(x, Fraction) else x for x in row]
        scale = math.lcm(*(f.denominator for f in fr)) if fr else 1
        rows.append([int(f * scale) for f in fr])
    nrows = len(rows)
    ncols = len(rows[0]) if nrows else 0
    rank = 0
    prev = 1
    r = 0
    cols = list(range(ncols))
    while r < nrows and r < len(cols):
        # find a pivot anywhere in the remaining block
        pr = pc = None
        for cj in range(r, len(cols)):
            for ri in range(r, nrows):
                if rows[ri][cols[cj]] != 0:
                    pr, pc = ri, cj
                    break
            if pr is not None:
                break
        if pr is None:
            break
        rows[r], rows[pr] = rows[pr], rows[r]
        cols[r], cols[pc] = cols[pc], cols[r]
        pivot = rows[r][cols[r]]
        for ri in range(r + 1, nrows):
            f = rows[ri][cols[r]]
            for cj in range(r + 1, len(cols)):
                c = cols[cj]
                rows[ri][c] = (rows[ri][c] * pivot - f * rows[r][c]) // prev
            rows[ri][cols[r]] = 0
        prev = pivot
        rank += 1
        r += 1
    return rank
