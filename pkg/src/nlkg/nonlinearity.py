"""Cubic coefficient tensors and the Hermitian structure criterion.

A nonlinearity is a homogeneous cubic F_j(u) = sum C[j,k,l,m] u_k u_l u_m
with real coefficients.  Its single-conjugate symmetrisation Ftilde drives
the slow dynamics, and the global-existence criterion asks for a positive
Hermitian matrix A with Im(AY . Ftilde(Y)) identically zero.  That is a
polynomial identity in (Y, conj Y), so it is decided exactly over the
rationals; floats only appear in field evaluation and witnesses.

The scalar product used throughout is Y . Z = sum_n Y_n conj(Z_n).  The
truth value of the criterion does not depend on which argument carries
the conjugate because A is Hermitian (tested).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .exactalg import (EC_ONE, EC_ZERO, ExactComplex, leading_minors,
                       parse_rational, positive_combination, rational_nullspace)
from .spectral import VectorField, bessel_multiplier, physical_values

__all__ = [
    "CubicTensor", "HermitianForm", "MonomialPolynomial",
    "StructureVerdict", "SearchResult",
    "eval_F", "eval_F_exact", "eval_Ftilde", "eval_Ftilde_exact", "eval_G",
    "expand_condition", "structure_verify", "structure_search",
    "builtin_tensor", "tensor_from_config",
    "NotHermitianError", "NotPositiveDefiniteError", "UnsupportedDimensionError",
]


class NotHermitianError(ValueError):
    pass


class NotPositiveDefiniteError(ValueError):
    pass


class UnsupportedDimensionError(ValueError):
    pass


@dataclass(frozen=True)
class CubicTensor:
    """Real coefficients C[j,k,l,m] of the cubic polynomial, stored exactly.

    Indices are 0-based internally; the config format is 1-based.  The
    tensor is kept as given, no symmetrisation over (k,l,m) is applied.
    """

    n_components: int
    coeffs: tuple  # tuple of ((j,k,l,m), Fraction) pairs, sorted

    @classmethod
    def from_entries(cls, n_components: int, entries: dict) -> "CubicTensor":
        clean = {}
        for idx, val in entries.items():
            j, k, l, m = idx
            if not all(0 <= a < n_components for a in idx):
                raise ValueError(f"tensor index {idx} out of range")
            v = parse_rational(val)
            if v != 0:
                clean[(j, k, l, m)] = clean.get((j, k, l, m), Fraction(0)) + v
        items = tuple(sorted((idx, v) for idx, v in clean.items() if v != 0))
        return cls(n_components, items)

    @property
    def entry_map(self) -> dict:
        return dict(self.coeffs)

    @property
    def array(self) -> np.ndarray:
        """Dense float view, shape (N, N, N, N)."""
        n = self.n_components
        arr = np.zeros((n, n, n, n))
        for (j, k, l, m), v in self.coeffs:
            arr[j, k, l, m] += float(v)
        return arr

    def is_zero(self) -> bool:
        return not self.coeffs

    def scaled(self, factor) -> "CubicTensor":
        f = parse_rational(factor)
        return CubicTensor.from_entries(
            self.n_components, {idx: v * f for idx, v in self.coeffs})

    def to_config(self) -> dict:
        return {
            "n": self.n_components,
            "entries": [[j + 1, k + 1, l + 1, m + 1, str(v)]
                        for (j, k, l, m), v in self.coeffs],
        }


def tensor_from_config(cfg: dict) -> CubicTensor:
    """Parse {"n": N, "entries": [[j,k,l,m,"value"], ...]} (1-based)."""
    n = int(cfg["n"])
    entries = {}
    for j, k, l, m, val in cfg.get("entries", []):
        idx = (int(j) - 1, int(k) - 1, int(l) - 1, int(m) - 1)
        entries[idx] = entries.get(idx, Fraction(0)) + parse_rational(val)
    return CubicTensor.from_entries(n, entries)


def builtin_tensor(name: str) -> CubicTensor:
    """Named tensors: scalar_cubic, complex_cubic, rho_family(r1,r2,r3,r4),
    counterexample."""
    name = name.strip()
    if name == "scalar_cubic":
        return CubicTensor.from_entries(1, {(0, 0, 0, 0): 1})
    if name == "complex_cubic":
        return _rho_family(1, 1, 1, 1)
    if name == "counterexample":
        return CubicTensor.from_entries(2, {(1, 0, 0, 0): 1})
    if name.startswith("rho_family(") and name.endswith(")"):
        parts = name[len("rho_family("):-1].split(",")
        if len(parts) != 4:
            raise ValueError("rho_family takes four parameters")
        return _rho_family(*[parse_rational(p) for p in parts])
    raise KeyError(f"unknown tensor name {name!r}")


def _rho_family(r1, r2, r3, r4) -> CubicTensor:
    # (r1 u1^2 + r2 u2^2) u1 and (r3 u1^2 + r4 u2^2) u2
    return CubicTensor.from_entries(2, {
        (0, 0, 0, 0): r1,
        (0, 1, 1, 0): r2,
        (1, 0, 0, 1): r3,
        (1, 1, 1, 1): r4,
    })


# ---------------------------------------------------------------------------
# evaluation

def eval_F(tensor: CubicTensor, u):
    """Pointwise cubic F(u) for a real vector or a VectorField.

    Field arguments are evaluated with dealiased (zero padded) products and
    returned as a physical field.
    """
    if isinstance(u, VectorField):
        vals = physical_values(u)
        if np.max(np.abs(vals.imag)) > 1e-10 * max(np.max(np.abs(vals)), 1e-300):
            raise ValueError("eval_F expects a real-valued field")
        from .spectral import fft_forward, fft_inverse, pad_spectrum, truncate_spectrum
        grid = u.grid
        fine_vals = fft_inverse(grid.fine, pad_spectrum(grid, fft_forward(grid, vals))).real
        cubic = eval_cubic_values(tensor, fine_vals)
        spec = truncate_spectrum(grid, fft_forward(grid.fine, cubic))
        return VectorField(grid, fft_inverse(grid, spec), "physical")
    u = np.asarray(u, dtype=float)
    if u.shape[0] != tensor.n_components:
        raise ValueError("dimension mismatch")
    return eval_cubic_values(tensor, u)


def eval_cubic_values(tensor: CubicTensor, u: np.ndarray) -> np.ndarray:
    """Raw cubic contraction on an (N, ...) array, no dealiasing."""
    out = np.zeros_like(u)
    for (j, k, l, m), v in tensor.coeffs:
        out[j] += float(v) * u[k] * u[l] * u[m]
    return out


def eval_F_exact(tensor: CubicTensor, u) -> list:
    """Exact rational evaluation on a vector of Fractions."""
    u = [parse_rational(x) for x in u]
    if len(u) != tensor.n_components:
        raise ValueError("dimension mismatch")
    out = [Fraction(0)] * tensor.n_components
    for (j, k, l, m), v in tensor.coeffs:
        out[j] += v * u[k] * u[l] * u[m]
    return out


def eval_Ftilde(tensor: CubicTensor, Y: np.ndarray) -> np.ndarray:
    """Single-conjugate symmetrised cubic on complex arrays of shape (N, ...)."""
    Y = np.asarray(Y, dtype=complex)
    if Y.shape[0] != tensor.n_components:
        raise ValueError("dimension mismatch")
    out = np.zeros_like(Y)
    for (j, k, l, m), v in tensor.coeffs:
        c = float(v)
        out[j] += c * (np.conj(Y[k]) * Y[l] * Y[m]
                       + Y[k] * np.conj(Y[l]) * Y[m]
                       + Y[k] * Y[l] * np.conj(Y[m]))
    return out


def eval_Ftilde_exact(tensor: CubicTensor, Y) -> list:
    Y = [ExactComplex.of(v) for v in Y]
    if len(Y) != tensor.n_components:
        raise ValueError("dimension mismatch")
    out = [EC_ZERO] * tensor.n_components
    for (j, k, l, m), v in tensor.coeffs:
        s = (Y[k].conjugate() * Y[l] * Y[m]
             + Y[k] * Y[l].conjugate() * Y[m]
             + Y[k] * Y[l] * Y[m].conjugate())
        out[j] = out[j] + ExactComplex(v) * s
    return out


def eval_G(tensor: CubicTensor, v: VectorField, check: bool = True) -> VectorField:
    """Nonlinear term of the reduced system: (i/2) <i d/dx>^-1 F(v + conj v).

    With ``check`` the equivalent form 4i <i d/dx>^-1 F(Re v) is evaluated
    too and both are required to agree to 1e-12, a built-in consistency
    test of cubic homogeneity.
    """
    if v.representation != "physical":
        raise ValueError("eval_G expects a physical field")
    grid = v.grid
    vv = v.components
    re_sum = VectorField(grid, (vv + np.conj(vv)).real.astype(complex), "physical")
    f1 = eval_F(tensor, re_sum)
    g1 = bessel_multiplier(VectorField(grid, 0.5j * f1.components, "physical"), -1.0)
    if check:
        re_half = VectorField(grid, vv.real.astype(complex), "physical")
        f2 = eval_F(tensor, re_half)
        g2 = bessel_multiplier(VectorField(grid, 4j * f2.components, "physical"), -1.0)
        scale = max(np.max(np.abs(g1.components)), 1e-300)
        if np.max(np.abs(g1.components - g2.components)) > 1e-12 * max(scale, 1.0):
            raise AssertionError("the two forms of the nonlinear term disagree")
    return g1


# ---------------------------------------------------------------------------
# the structure criterion, exactly

@dataclass
class MonomialPolynomial:
    """Polynomial in (Y, conj Y) as exponent-pair -> exact coefficient.

    Keys are (alpha, beta) with alpha, beta integer multi-indices over the
    components; every stored monomial has |alpha| + |beta| = 4 here.
    """

    n_components: int
    terms: dict = field(default_factory=dict)

    def add(self, alpha: tuple, beta: tuple, coeff: ExactComplex):
        if coeff.is_zero():
            return
        key = (alpha, beta)
        cur = self.terms.get(key, EC_ZERO) + coeff
        if cur.is_zero():
            self.terms.pop(key, None)
        else:
            self.terms[key] = cur

    def coefficient(self, alpha: tuple, beta: tuple) -> ExactComplex:
        return self.terms.get((alpha, beta), EC_ZERO)

    def conjugate_asymmetries(self) -> list:
        """Monomial pairs violating c[a,b] == conj(c[b,a]).

        The polynomial is real valued for every Y exactly when this list
        is empty.
        """
        bad = []
        seen = set()
        for (alpha, beta) in list(self.terms) + [(b, a) for (a, b) in self.terms]:
            if (alpha, beta) in seen or (beta, alpha) in seen:
                continue
            seen.add((alpha, beta))
            c_ab = self.coefficient(alpha, beta)
            c_ba = self.coefficient(beta, alpha)
            if not (c_ab - c_ba.conjugate()).is_zero():
                bad.append(((alpha, beta), c_ab, c_ba))
        return bad

    def evaluate(self, Y: np.ndarray) -> complex:
        Y = np.asarray(Y, dtype=complex)
        total = 0j
        for (alpha, beta), c in self.terms.items():
            term = c.to_complex()
            for n, a in enumerate(alpha):
                term *= Y[n] ** a
            for n, b in enumerate(beta):
                term *= np.conj(Y[n]) ** b
            total += term
        return total


@dataclass(frozen=True)
class HermitianForm:
    """N x N Hermitian matrix with exact complex-rational entries."""

    n: int
    entries: tuple  # tuple of tuples of ExactComplex

    @classmethod
    def from_rows(cls, rows) -> "HermitianForm":
        ents = tuple(tuple(ExactComplex.of(v) for v in row) for row in rows)
        n = len(ents)
        if any(len(r) != n for r in ents):
            raise ValueError("matrix must be square")
        form = cls(n, ents)
        if not form.is_hermitian():
            raise NotHermitianError("matrix is not conjugate-transpose symmetric")
        return form

    @classmethod
    def identity(cls, n: int) -> "HermitianForm":
        return cls.from_rows([[EC_ONE if i == j else EC_ZERO for j in range(n)]
                              for i in range(n)])

    @classmethod
    def diagonal(cls, values) -> "HermitianForm":
        vals = [parse_rational(v) for v in values]
        n = len(vals)
        return cls.from_rows([[ExactComplex(vals[i]) if i == j else EC_ZERO
                               for j in range(n)] for i in range(n)])

    def is_hermitian(self) -> bool:
        for i in range(self.n):
            for j in range(self.n):
                if not (self.entries[i][j] - self.entries[j][i].conjugate()).is_zero():
                    return False
        return True

    def is_positive_definite(self) -> bool:
        """Sylvester criterion on exact leading principal minors."""
        for minor in leading_minors([list(r) for r in self.entries]):
            if minor.im != 0:
                raise AssertionError("Hermitian minor came out non-real")
            if minor.re <= 0:
                return False
        return True

    def assert_positive_definite(self):
        if not self.is_positive_definite():
            raise NotPositiveDefiniteError(
                "matrix is Hermitian but not positive definite")

    @property
    def array(self) -> np.ndarray:
        return np.array([[v.to_complex() for v in row] for row in self.entries])

    def eigen_bounds(self) -> tuple:
        """(smallest, largest) eigenvalue of the float view."""
        w = np.linalg.eigvalsh(self.array)
        return float(w[0]), float(w[-1])

    def to_config(self) -> list:
        return [[[str(v.re), str(v.im)] for v in row] for row in self.entries]


def hermitian_from_config(rows) -> HermitianForm:
    """Rows of rational strings, or [re, im] pairs for complex entries."""
    return HermitianForm.from_rows(
        [[ExactComplex.of(v) for v in row] for row in rows])


def _conjugated_patterns():
    # conj(Ftilde) monomials: exactly one of the three slots unconjugated
    return [(1, 0, 0), (0, 1, 0), (0, 0, 1)]


def expand_condition(tensor: CubicTensor, A: HermitianForm) -> MonomialPolynomial:
    """Canonical monomial form of AY . Ftilde(Y) with exact coefficients.

    With the product convention Y . Z = sum Y_n conj(Z_n) this is
    sum_n (AY)_n conj(Ftilde_n(Y)).  The imaginary part vanishes for all Y
    exactly when the result passes `conjugate_asymmetries`.
    """
    if A.n != tensor.n_components:
        raise ValueError("dimension mismatch between tensor and matrix")
    if not A.is_hermitian():
        raise NotHermitianError("expand_condition requires a Hermitian matrix")
    N = tensor.n_components
    poly = MonomialPolynomial(N)
    for (nrow, k, l, m), c in _condition_terms(tensor):
        for p in range(N):
            a_np = A.entries[nrow][p]
            if a_np.is_zero():
                continue
            for pattern in _conjugated_patterns():
                alpha = [0] * N
                beta = [0] * N
                alpha[p] += 1
                for slot, unconj in zip((k, l, m), pattern):
                    if unconj:
                        alpha[slot] += 1
                    else:
                        beta[slot] += 1
                poly.add(tuple(alpha), tuple(beta), a_np * ExactComplex(c))
    return poly


def _condition_terms(tensor: CubicTensor):
    for (j, k, l, m), v in tensor.coeffs:
        yield (j, k, l, m), v


@dataclass
class StructureVerdict:
    holds: bool
    violations: list
    witness: tuple | None  # (Y, value of Im(AY . Ftilde(Y)))

    def __bool__(self):
        return self.holds


def structure_verify(tensor: CubicTensor, A: HermitianForm,
                     seed: int = 0) -> StructureVerdict:
    """Exact decision of the structure criterion for a given matrix.

    Raises NotHermitianError or NotPositiveDefiniteError when A fails its
    own invariants; the theorem needs definiteness, so an indefinite A is
    rejected rather than tested.
    """
    if not A.is_hermitian():
        raise NotHermitianError("matrix is not Hermitian")
    A.assert_positive_definite()
    poly = expand_condition(tensor, A)
    bad = poly.conjugate_asymmetries()
    if not bad:
        return StructureVerdict(True, [], None)
    rng = np.random.default_rng(seed)
    best_y, best_val = None, -1.0
    Afloat = A.array
    for _ in range(512):
        Y = rng.standard_normal(tensor.n_components) + 1j * rng.standard_normal(tensor.n_components)
        val = abs(np.imag(np.dot(Afloat @ Y, np.conj(eval_Ftilde(tensor, Y)))))
        if val > best_val:
            best_val, best_y = val, Y
    return StructureVerdict(False, bad, (best_y, best_val))


@dataclass
class SearchResult:
    status: str  # "found" | "none_diagonal" | "none_found"
    matrix: HermitianForm | None = None
    obstruction: str | None = None

    @property
    def found(self) -> bool:
        return self.status == "found"


class _LinearForm:
    """Linear combination of real parameters with ExactComplex coefficients."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=None):
        self.coeffs = dict(coeffs or {})

    def add(self, idx: int, coeff: ExactComplex):
        cur = self.coeffs.get(idx, EC_ZERO) + coeff
        if cur.is_zero():
            self.coeffs.pop(idx, None)
        else:
            self.coeffs[idx] = cur

    def plus(self, other: "_LinearForm") -> "_LinearForm":
        out = _LinearForm(self.coeffs)
        for idx, c in other.coeffs.items():
            out.add(idx, c)
        return out

    def times(self, scalar: ExactComplex) -> "_LinearForm":
        out = _LinearForm()
        for idx, c in self.coeffs.items():
            out.add(idx, c * scalar)
        return out

    def conjugated(self) -> "_LinearForm":
        # parameters are real, so only the coefficients conjugate
        return _LinearForm({idx: c.conjugate() for idx, c in self.coeffs.items()})


def _hermitian_parameterisation(N: int):
    """Parameter layout: a_jj then (re, im) per off-diagonal pair j<k."""
    diag = {j: j for j in range(N)}
    off = {}
    idx = N
    for j in range(N):
        for k in range(j + 1, N):
            off[(j, k)] = (idx, idx + 1)
            idx += 2
    def entry(j, k) -> _LinearForm:
        form = _LinearForm()
        if j == k:
            form.add(diag[j], EC_ONE)
        elif j < k:
            re_i, im_i = off[(j, k)]
            form.add(re_i, EC_ONE)
            form.add(im_i, ExactComplex(Fraction(0), Fraction(1)))
        else:
            re_i, im_i = off[(k, j)]
            form.add(re_i, EC_ONE)
            form.add(im_i, ExactComplex(Fraction(0), Fraction(-1)))
        return form
    return idx, entry, diag, off


def _symbolic_condition_rows(tensor: CubicTensor):
    """Rational constraint rows (in the Hermitian parameters) equivalent to
    the polynomial identity Im(AY . Ftilde(Y)) == 0."""
    N = tensor.n_components
    n_params, entry, diag, off = _hermitian_parameterisation(N)
    terms: dict = {}
    for (nrow, k, l, m), c in tensor.coeffs:
        for p in range(N):
            form = entry(nrow, p).times(ExactComplex(c))
            for pattern in _conjugated_patterns():
                alpha = [0] * N
                beta = [0] * N
                alpha[p] += 1
                for slot, unconj in zip((k, l, m), pattern):
                    if unconj:
                        alpha[slot] += 1
                    else:
                        beta[slot] += 1
                key = (tuple(alpha), tuple(beta))
                terms[key] = terms.get(key, _LinearForm()).plus(form)
    rows = []
    seen = set()
    keys = set(terms)
    for alpha, beta in list(keys):
        if (alpha, beta) in seen or (beta, alpha) in seen:
            continue
        seen.add((alpha, beta))
        f_ab = terms.get((alpha, beta), _LinearForm())
        f_ba = terms.get((beta, alpha), _LinearForm())
        diff = f_ab.plus(f_ba.conjugated().times(ExactComplex(Fraction(-1))))
        row_re = [Fraction(0)] * n_params
        row_im = [Fraction(0)] * n_params
        for idx, coeff in diff.coeffs.items():
            row_re[idx] = coeff.re
            row_im[idx] = coeff.im
        if any(v != 0 for v in row_re):
            rows.append(row_re)
        if any(v != 0 for v in row_im):
            rows.append(row_im)
    return n_params, rows, diag, off


def _matrix_from_params(N: int, vec, diag, off) -> HermitianForm:
    rows = []
    for j in range(N):
        row = []
        for k in range(N):
            if j == k:
                row.append(ExactComplex(vec[diag[j]]))
            elif j < k:
                re_i, im_i = off[(j, k)]
                row.append(ExactComplex(vec[re_i], vec[im_i]))
            else:
                re_i, im_i = off[(k, j)]
                row.append(ExactComplex(vec[re_i], -vec[im_i]))
        rows.append(row)
    return HermitianForm(N, tuple(tuple(r) for r in rows))


def _canonical_scale(vec):
    denoms = [v.denominator for v in vec if v != 0]
    if not denoms:
        return vec
    lcm = 1
    for d in denoms:
        lcm = lcm * d // math.gcd(lcm, d)
    scaled = [v * lcm for v in vec]
    g = 0
    for v in scaled:
        g = math.gcd(g, abs(v.numerator))
    g = g or 1
    return [v / g for v in scaled]


def structure_search(tensor: CubicTensor, seed: int = 0,
                     max_samples: int = 200) -> SearchResult:
    """Look for a positive Hermitian matrix satisfying the criterion.

    The identity is linear in the entries of A, so the full solution set
    is an exact rational subspace.  If some diagonal entry vanishes on the
    whole subspace no positive definite solution can exist (none_found,
    with the obstruction named).  Otherwise a strictly positive diagonal
    solution is sought exactly; failing that, small rational combinations
    of the subspace basis are sampled and tested for definiteness.  Any
    returned matrix is re-verified exactly.
    """
    N = tensor.n_components
    if N > 4:
        raise UnsupportedDimensionError("search is limited to N <= 4")
    n_params, rows, diag, off = _symbolic_condition_rows(tensor)
    basis = rational_nullspace(rows, n_params)
    if not basis:
        return SearchResult("none_found", None,
                            "the only Hermitian solution is A = 0")
    for j in range(N):
        col = diag[j]
        if all(vec[col] == 0 for vec in basis):
            return SearchResult(
                "none_found", None,
                f"every Hermitian solution has A[{j + 1},{j + 1}] = 0, "
                "so no solution is positive definite")

    # diagonal-first: restrict the subspace to diagonal matrices
    diag_rows = rows + [_unit_row(n_params, i)
                        for i in range(N, n_params)]  # force off-diagonal = 0
    diag_basis = rational_nullspace(diag_rows, n_params)
    if diag_basis:
        diag_coords = [[vec[diag[j]] for j in range(N)] for vec in diag_basis]
        point = positive_combination(diag_coords)
        if point is not None:
            vals = _canonical_scale(point)
            candidate = HermitianForm.diagonal(vals)
            verdict = structure_verify(tensor, candidate)
            if not verdict.holds:
                raise AssertionError("diagonal solution failed exact re-verification")
            return SearchResult("found", candidate, None)

    # sample the full Hermitian solution subspace
    rng = np.random.default_rng(seed)
    candidates = []
    for vec in basis:
        candidates.append(vec)
        candidates.append([-v for v in vec])
    if len(basis) > 1:
        candidates.append([sum(col) for col in zip(*basis)])
    for _ in range(max_samples):
        weights = rng.integers(-3, 4, size=len(basis))
        if not np.any(weights):
            continue
        candidates.append([sum(Fraction(int(w)) * vec[i] for w, vec in zip(weights, basis))
                           for i in range(n_params)])
    for vec in candidates:
        if all(v == 0 for v in vec):
            continue
        cand = _matrix_from_params(N, _canonical_scale(vec), diag, off)
        if not cand.is_positive_definite():
            continue
        verdict = structure_verify(tensor, cand)
        if verdict.holds:
            return SearchResult("found", cand, None)
    return SearchResult(
        "none_diagonal", None,
        "no strictly positive diagonal solution exists and subspace sampling "
        "found no positive definite matrix")


def _unit_row(n: int, idx: int):
    row = [Fraction(0)] * n
    row[idx] = Fraction(1)
    return row
