"""Exact rational and complex-rational arithmetic for structure decisions.

Everything here works over Fraction, so polynomial identities are decided
without tolerances.  Floats appear only in convenience views.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction


def parse_rational(value) -> Fraction:
    """Accept Fraction, int, or exact strings like "3/2" or "-0.25"."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    if isinstance(value, float):
        # floats are taken at face value; callers wanting exactness pass strings
        return Fraction(value).limit_denominator(10 ** 12)
    raise TypeError(f"cannot interpret {value!r} as an exact rational")


@dataclass(frozen=True)
class ExactComplex:
    """Complex number with exact rational real and imaginary parts."""

    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    @classmethod
    def of(cls, value) -> "ExactComplex":
        if isinstance(value, ExactComplex):
            return value
        if isinstance(value, (list, tuple)) and len(value) == 2:
            return cls(parse_rational(value[0]), parse_rational(value[1]))
        return cls(parse_rational(value))

    def __add__(self, other):
        other = ExactComplex.of(other)
        return ExactComplex(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = ExactComplex.of(other)
        return ExactComplex(self.re - other.re, self.im - other.im)

    def __neg__(self):
        return ExactComplex(-self.re, -self.im)

    def __mul__(self, other):
        other = ExactComplex.of(other)
        return ExactComplex(self.re * other.re - self.im * other.im,
                            self.re * other.im + self.im * other.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = ExactComplex.of(other)
        d = other.re * other.re + other.im * other.im
        if d == 0:
            raise ZeroDivisionError("division by exact zero")
        return ExactComplex((self.re * other.re + self.im * other.im) / d,
                            (self.im * other.re - self.re * other.im) / d)

    def conjugate(self) -> "ExactComplex":
        return ExactComplex(self.re, -self.im)

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def to_complex(self) -> complex:
        return complex(float(self.re), float(self.im))

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        return f"{self.re}{'+' if self.im >= 0 else '-'}{abs(self.im)}i"


EC_ZERO = ExactComplex()
EC_ONE = ExactComplex(Fraction(1))


def rational_nullspace(rows: list[list[Fraction]], n_cols: int) -> list[list[Fraction]]:
    """Basis of the nullspace of a rational matrix, by Gauss-Jordan."""
    mat = [list(r) for r in rows]
    pivots = []
    r = 0
    for c in range(n_cols):
        pivot = next((i for i in range(r, len(mat)) if mat[i][c] != 0), None)
        if pivot is None:
            continue
        mat[r], mat[pivot] = mat[pivot], mat[r]
        pv = mat[r][c]
        mat[r] = [v / pv for v in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c] != 0:
                f = mat[i][c]
                mat[i] = [a - f * b for a, b in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
        if r == len(mat):
            break
    free_cols = [c for c in range(n_cols) if c not in pivots]
    basis = []
    for fc in free_cols:
        vec = [Fraction(0)] * n_cols
        vec[fc] = Fraction(1)
        for i, pc in enumerate(pivots):
            vec[pc] = -mat[i][fc]
        basis.append(vec)
    return basis


def _fm_eliminate(constraints: list[tuple[list[Fraction], Fraction]], var: int):
    """One Fourier-Motzkin step on constraints sum(c_i x_i) >= const."""
    pos, neg, rest = [], [], []
    for coeffs, const in constraints:
        c = coeffs[var]
        if c > 0:
            pos.append((coeffs, const))
        elif c < 0:
            neg.append((coeffs, const))
        else:
            rest.append((coeffs, const))
    for cp, kp in pos:
        for cn, kn in neg:
            # combine so that the eliminated coefficient cancels
            a, b = -cn[var], cp[var]
            coeffs = [a * p + b * q for p, q in zip(cp, cn)]
            coeffs[var] = Fraction(0)
            rest.append((coeffs, a * kp + b * kn))
    return rest, pos, neg


def positive_combination(basis: list[list[Fraction]]):
    """Find rational lambdas with sum(lambda_i basis_i) >= 1 componentwise.

    Returns the strictly positive vector itself, or None when the span of
    the basis contains no entrywise positive point.  Decided exactly by
    Fourier-Motzkin elimination; dimensions here are tiny.
    """
    if not basis:
        return None
    dim = len(basis[0])
    nvar = len(basis)
    constraints = []
    for j in range(dim):
        coeffs = [basis[i][j] for i in range(nvar)]
        constraints.append((coeffs, Fraction(1)))
    stack = []
    cur = constraints
    for var in range(nvar - 1, -1, -1):
        cur, pos, neg = _fm_eliminate(cur, var)
        stack.append((var, pos, neg))
    for coeffs, const in cur:
        if all(c == 0 for c in coeffs) and const > 0:
            return None
    lam = [Fraction(0)] * nvar
    for var, pos, neg in reversed(stack):
        lower = None
        upper = None
        # pos rows: c*x >= const - rest  ->  x >= (...)/c   (c > 0)
        for coeffs, const in pos:
            bound = (const - sum(c * lam[i] for i, c in enumerate(coeffs) if i != var)) / coeffs[var]
            lower = bound if lower is None else max(lower, bound)
        for coeffs, const in neg:
            bound = (const - sum(c * lam[i] for i, c in enumerate(coeffs) if i != var)) / coeffs[var]
            upper = bound if upper is None else min(upper, bound)
        if lower is None and upper is None:
            lam[var] = Fraction(0)
        elif lower is None:
            lam[var] = upper - 1
        elif upper is None:
            lam[var] = lower + 1 if lower == int(lower) else Fraction(int(lower) + 1)
        else:
            if lower > upper:
                return None
            lam[var] = (lower + upper) / 2
    point = [sum(lam[i] * basis[i][j] for i in range(nvar)) for j in range(dim)]
    if any(p < 1 for p in point):
        return None
    return point


def exact_determinant(matrix: list[list[ExactComplex]]) -> ExactComplex:
    """Determinant by fraction-exact Gaussian elimination with pivoting."""
    n = len(matrix)
    mat = [[ExactComplex.of(v) for v in row] for row in matrix]
    det = EC_ONE
    for c in range(n):
        pivot = next((i for i in range(c, n) if not mat[i][c].is_zero()), None)
        if pivot is None:
            return EC_ZERO
        if pivot != c:
            mat[c], mat[pivot] = mat[pivot], mat[c]
            det = -det
        pv = mat[c][c]
        det = det * pv
        for i in range(c + 1, n):
            if mat[i][c].is_zero():
                continue
            f = mat[i][c] / pv
            mat[i] = [a - f * b for a, b in zip(mat[i], mat[c])]
    return det


def leading_minors(matrix: list[list[ExactComplex]]) -> list[ExactComplex]:
    n = len(matrix)
    return [exact_determinant([row[:k] for row in matrix[:k]]) for k in range(1, n + 1)]
