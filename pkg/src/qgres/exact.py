"""Exact rational linear algebra and polynomial root extraction.

Exact matrices are numpy ``object`` arrays of :class:`fractions.Fraction`.
Determinants and ranks use fraction-free (Bareiss) elimination on
integer-scaled rows; characteristic polynomials use Faddeev-LeVerrier,
which stays exact over the rationals.  Roots are found numerically with the
Aberth-Ehrlich iteration, after an exact square-free decomposition when the
coefficients are rational so that multiple roots never reach the
floating-point stage.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from numbers import Number
from typing import Iterable, Sequence

import numpy as np

from .errors import NoConvergence

CLUSTER_TOL = 1e-7
RESIDUAL_TOL = 1e-9
MAX_ITER = 500


def is_rational(x) -> bool:
    return isinstance(x, (Fraction, int)) and not isinstance(x, bool)


def to_fraction_matrix(M) -> np.ndarray:
    arr = np.asarray(M, dtype=object)
    out = np.empty(arr.shape, dtype=object)
    for idx, x in np.ndenumerate(arr):
        out[idx] = Fraction(x)
    return out


def fraction_identity(n: int) -> np.ndarray:
    eye = np.full((n, n), Fraction(0), dtype=object)
    for i in range(n):
        eye[i, i] = Fraction(1)
    return eye


def is_exact_matrix(M: np.ndarray) -> bool:
    return M.dtype == object and all(is_rational(x) for x in M.flat)


# --------------------------------------------------------------------------
# polynomials

@dataclass(frozen=True)
class Polynomial:
    """Polynomial with coefficients indexed by power (``coeffs[i]`` multiplies ``z**i``).

    Exact zeros at the top are trimmed on construction, so ``degree`` is the
    true degree for rational coefficients.  The zero polynomial has degree -1.
    """

    coeffs: tuple

    def __post_init__(self) -> None:
        c = list(self.coeffs)
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(c))

    @classmethod
    def from_roots(cls, roots: Iterable) -> Polynomial:
        p = cls((1,))
        for r in roots:
            p = p * cls((-r, 1))
        return p

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_exact(self) -> bool:
        return all(is_rational(c) for c in self.coeffs)

    def coeff(self, i: int):
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else 0

    def __call__(self, z):
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * z + c
        return acc

    def derivative(self) -> Polynomial:
        return Polynomial(tuple(i * c for i, c in enumerate(self.coeffs) if i))

    def __add__(self, other: Polynomial) -> Polynomial:
        n = max(len(self.coeffs), len(other.coeffs))
        return Polynomial(tuple(self.coeff(i) + other.coeff(i) for i in range(n)))

    def __sub__(self, other: Polynomial) -> Polynomial:
        n = max(len(self.coeffs), len(other.coeffs))
        return Polynomial(tuple(self.coeff(i) - other.coeff(i) for i in range(n)))

    def __mul__(self, other) -> Polynomial:
        if isinstance(other, Number):
            return Polynomial(tuple(c * other for c in self.coeffs))
        if not self.coeffs or not other.coeffs:
            return Polynomial(())
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Polynomial(tuple(out))

    __rmul__ = __mul__

    def __divmod__(self, other: Polynomial) -> tuple[Polynomial, Polynomial]:
        if other.degree < 0:
            raise ZeroDivisionError("polynomial division by zero")
        rem = [Fraction(c) for c in self.coeffs]
        lead = Fraction(other.coeffs[-1])
        dq = len(rem) - len(other.coeffs)
        if dq < 0:
            return Polynomial(()), self
        quot = [Fraction(0)] * (dq + 1)
        for shift in range(dq, -1, -1):
            f = rem[shift + other.degree] / lead
            quot[shift] = f
            if f:
                for i, b in enumerate(other.coeffs):
                    rem[shift + i] -= f * b
        return Polynomial(tuple(quot)), Polynomial(tuple(rem[: other.degree]))

    def __floordiv__(self, other: Polynomial) -> Polynomial:
        q, r = divmod(self, other)
        if r.degree >= 0:
            raise ArithmeticError("inexact polynomial division")
        return q

    def monic(self) -> Polynomial:
        lead = Fraction(self.coeffs[-1])
        return Polynomial(tuple(Fraction(c) / lead for c in self.coeffs))

    def trimmed(self, rtol: float) -> Polynomial:
        """Drop top coefficients whose modulus is below ``rtol * max|coeff|``."""
        if not self.coeffs:
            return self
        scale = max(abs(c) for c in self.coeffs)
        c = list(self.coeffs)
        while c and abs(c[-1]) <= rtol * scale:
            c.pop()
        return Polynomial(tuple(c))

    def as_complex(self) -> np.ndarray:
        return np.array([complex(c) for c in self.coeffs], dtype=complex)

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        parts = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            mono = "" if i == 0 else ("z" if i == 1 else f"z^{i}")
            parts.append((format_number(c), mono))
        out = ""
        for text, mono in parts:
            neg = text.startswith("-")
            mag = text[1:] if neg else text
            if mono and mag == "1":
                mag = ""
            term = mag + ("*" if mag and mono else "") + mono
            if not out:
                out = ("-" if neg else "") + term
            else:
                out += (" - " if neg else " + ") + term
        return out


def poly_gcd(a: Polynomial, b: Polynomial) -> Polynomial:
    """Monic gcd over the rationals."""
    while b.degree >= 0:
        a, b = b, divmod(a, b)[1]
    return a.monic() if a.degree >= 0 else a


def squarefree_decomposition(p: Polynomial) -> list[tuple[Polynomial, int]]:
    """Yun's algorithm: ``p = lc * prod f_i**i`` with each ``f_i`` square-free and monic."""
    if not p.is_exact:
        raise TypeError("square-free decomposition needs rational coefficients")
    if p.degree < 1:
        return []
    f = p.monic()
    df = f.derivative()
    b = poly_gcd(f, df)
    c = f // b
    d = (df // b) - c.derivative()
    out = []
    i = 1
    while c.degree > 0:
        a = poly_gcd(c, d)
        if a.degree > 0:
            out.append((a, i))
        c = c // a
        d = (d // a) - c.derivative()
        i += 1
    return out


def format_number(x, digits: int = 12) -> str:
    if is_rational(x):
        x = Fraction(x)
        return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
    return format_complex(complex(x), digits)


def format_complex(z: complex, digits: int = 12) -> str:
    re = float(f"{z.real:.{digits}g}")
    im = float(f"{z.imag:.{digits}g}")
    re_s = f"{re + 0.0:.{digits}g}"
    im_s = f"{abs(im):.{digits}g}"
    sign = "-" if im < 0 else "+"
    return f"{re_s}{sign}{im_s}i"


# --------------------------------------------------------------------------
# determinants and characteristic polynomials

def _integer_rows(M: np.ndarray) -> tuple[list[list[int]], Fraction]:
    """Scale each row to integers; returns rows and the product of the scale factors."""
    rows = []
    scale = Fraction(1)
    for row in M:
        fr = [Fraction(x) for x in row]
        lcm = reduce(lambda a, b: a * b // math.gcd(a, b), (x.denominator for x in fr), 1)
        rows.append([int(x * lcm) for x in fr])
        scale *= lcm
    return rows, scale


@dataclass(frozen=True)
class DetRank:
    det: Fraction
    rank: int


def det_rank(M) -> DetRank:
    """Exact determinant and rank by Bareiss fraction-free elimination."""
    M = np.asarray(M, dtype=object)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError("det_rank needs a square matrix")
    n = M.shape[0]
    if n == 0:
        return DetRank(Fraction(1), 0)
    A, scale = _integer_rows(M)
    prev = 1
    sign = 1
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, n) if A[i][c] != 0), None)
        if piv is None:
            continue
        if piv != r:
            A[r], A[piv] = A[piv], A[r]
            sign = -sign
        arc = A[r][c]
        for i in range(r + 1, n):
            aic = A[i][c]
            row_i, row_r = A[i], A[r]
            for j in range(c + 1, n):
                row_i[j] = (row_i[j] * arc - aic * row_r[j]) // prev
            row_i[c] = 0
        prev = arc
        r += 1
    det = Fraction(sign * prev, 1) / scale if r == n else Fraction(0)
    return DetRank(det, r)


def rank(M) -> int:
    """Exact rank of a (possibly rectangular) rational matrix."""
    M = np.asarray(M, dtype=object)
    rows, cols = M.shape
    if rows < cols:
        M = M.T
        rows, cols = cols, rows
    square = np.full((rows, rows), Fraction(0), dtype=object)
    square[:, :cols] = M
    return det_rank(square).rank


def charpoly(A) -> Polynomial:
    """Monic characteristic polynomial ``det(lambda I - A)`` by Faddeev-LeVerrier.

    Works for exact (Fraction object) and complex matrices alike.
    """
    A = np.asarray(A)
    n = A.shape[0]
    exact = A.dtype == object
    eye = fraction_identity(n) if exact else np.eye(n, dtype=complex)
    c = [None] * (n + 1)
    c[n] = Fraction(1) if exact else 1.0 + 0j
    Mk = eye * 0
    for k in range(1, n + 1):
        Mk = A.dot(Mk) + c[n - k + 1] * eye
        tr = np.trace(A.dot(Mk))
        c[n - k] = -(Fraction(tr) / k if exact else tr / k)
    return Polynomial(tuple(c))


def charpoly_zS_minus_I(S) -> Polynomial:
    """Coefficients of ``P(z) = det(z S - I)``.

    With ``chi(x) = det(x I - S) = sum a_i x^i`` one has
    ``P(z) = (-1)^n sum_i a_i z^(n-i)``.
    """
    S = np.asarray(S)
    n = S.shape[0]
    if n == 0:
        return Polynomial((Fraction(1),))
    chi = charpoly(S)
    sign = -1 if n % 2 else 1
    return Polynomial(tuple(sign * chi.coeff(n - t) for t in range(n + 1)))


# --------------------------------------------------------------------------
# roots

@dataclass(frozen=True)
class Root:
    value: complex
    multiplicity: int
    exact: Fraction | None = None  # set when the root is rational


@dataclass(frozen=True)
class RootSet:
    roots: tuple[Root, ...]

    def __iter__(self):
        return iter(self.roots)

    def __len__(self) -> int:
        return len(self.roots)

    @property
    def total_multiplicity(self) -> int:
        return sum(r.multiplicity for r in self.roots)

    def values(self) -> list[complex]:
        return [r.value for r in self.roots for _ in range(r.multiplicity)]


DIVISOR_LIMIT = 10**12


def _divisors(n: int) -> list[int] | None:
    n = abs(n)
    if n > DIVISOR_LIMIT:
        return None
    small, large = [], []
    d = 1
    while d * d <= n:
        if n % d == 0:
            small.append(d)
            if d * d != n:
                large.append(n // d)
        d += 1
    return small + large[::-1]


def rational_roots(p: Polynomial) -> list[Fraction]:
    """Distinct rational roots of a rational polynomial (rational root test).

    Returns an empty list when the integer coefficients are too large to
    enumerate candidate divisors.
    """
    if p.degree < 1:
        return []
    coeffs = [Fraction(c) for c in p.coeffs]
    found: list[Fraction] = []
    while coeffs and coeffs[0] == 0:
        coeffs.pop(0)
        if Fraction(0) not in found:
            found.append(Fraction(0))
    if len(coeffs) < 2:
        return found
    lcm = reduce(lambda a, b: a * b // math.gcd(a, b), (c.denominator for c in coeffs), 1)
    ints = [int(c * lcm) for c in coeffs]
    num_divs = _divisors(ints[0])
    den_divs = _divisors(ints[-1])
    if num_divs is None or den_divs is None:
        return found
    q = Polynomial(tuple(ints))
    seen = set()
    for a in num_divs:
        for b in den_divs:
            for cand in (Fraction(a, b), Fraction(-a, b)):
                if cand in seen:
                    continue
                seen.add(cand)
                if q(cand) == 0:
                    found.append(cand)
    return found


def _horner_with_derivative(c: np.ndarray, z: complex) -> tuple[complex, complex, float]:
    """p(z), p'(z) and the rounding-error scale sum |c_i| |z|^i (coeffs low->high)."""
    p = 0j
    dp = 0j
    bound = 0.0
    az = abs(z)
    for a in c[::-1]:
        dp = dp * z + p
        p = p * z + a
        bound = bound * az + abs(a)
    return p, dp, bound


def aberth(coeffs: Sequence[complex], tol: float = 1e-14, max_iter: int = MAX_ITER) -> np.ndarray:
    """All roots of a polynomial (coefficients low->high) by Aberth-Ehrlich iteration.

    Each approximation is frozen once its correction is below ``tol`` relative
    to its modulus or its residual reaches rounding level.
    """
    c = np.asarray(coeffs, dtype=complex)
    n = len(c) - 1
    if n < 1 or c[-1] == 0:
        raise ValueError("need a polynomial of degree >= 1 with nonzero leading coefficient")
    c = c / c[-1]
    if n == 1:
        return np.array([-c[0]])
    # start on a circle of the geometric-mean root modulus, rotated off the axes
    radius = abs(c[0]) ** (1.0 / n) if c[0] != 0 else 1.0
    radius = radius or 1.0
    z = radius * np.exp(1j * (2 * np.pi * np.arange(n) / n + 0.4))
    done = np.zeros(n, dtype=bool)
    eps = np.finfo(float).eps
    for _ in range(max_iter):
        for i in range(n):
            if done[i]:
                continue
            p, dp, bound = _horner_with_derivative(c, z[i])
            if abs(p) <= 4 * eps * bound:
                done[i] = True
                continue
            diff = z[i] - np.delete(z, i)
            if np.any(diff == 0):
                z[i] += tol * (1 + abs(z[i]))
                continue
            ratio = p / dp if dp != 0 else complex(tol, tol)
            w = ratio / (1 - ratio * np.sum(1.0 / diff))
            z[i] -= w
            if abs(w) <= tol * max(abs(z[i]), 1e-300):
                done[i] = True
        if done.all():
            return z
    raise NoConvergence(f"Aberth iteration did not converge in {max_iter} iterations")


def _newton_polish(c: np.ndarray, z: complex, steps: int = 3) -> complex:
    for _ in range(steps):
        p, dp, _ = _horner_with_derivative(c, z)
        if dp == 0:
            break
        step = p / dp
        z -= step
        if abs(step) <= 1e-17 * max(abs(z), 1.0):
            break
    return z


def _cluster(values: np.ndarray, tol: float) -> list[Root]:
    """Single-linkage clustering of approximate roots into multiplicities."""
    n = len(values)
    parent = list(range(n))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(values[i] - values[j]) < tol:
                parent[find(i)] = find(j)
    groups: dict[int, list[complex]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(values[i])
    return [Root(complex(np.mean(g)), len(g)) for g in groups.values()]


def roots(p: Polynomial, cluster_tol: float = CLUSTER_TOL, residual_tol: float = RESIDUAL_TOL) -> RootSet:
    """Roots of ``p`` with multiplicities.

    Rational polynomials are split into square-free factors first; each
    factor has simple roots, so multiplicities are exact.  Complex
    polynomials are solved directly and nearby roots are merged when closer
    than ``cluster_tol``.
    """
    if p.degree < 1:
        raise ValueError("roots() needs degree >= 1")
    found: list[Root] = []
    if p.is_exact:
        for factor, mult in squarefree_decomposition(p):
            for q in rational_roots(factor):
                found.append(Root(complex(q), mult, q))
                factor = factor // Polynomial((-q, 1))
            if factor.degree < 1:
                continue
            fc = factor.as_complex()
            for z in aberth(fc):
                found.append(Root(complex(_newton_polish(fc, complex(z))), mult))
    else:
        found = _cluster(aberth(p.as_complex()), cluster_tol)

    full = p.as_complex()
    scale = float(np.max(np.abs(full)))
    for r in found:
        val, _, _ = _horner_with_derivative(full, r.value)
        if abs(val) > residual_tol * scale * max(1.0, abs(r.value)) ** p.degree:
            raise NoConvergence(f"root {r.value} has residual {abs(val):.3e}")
    found.sort(key=lambda r: (round(r.value.real, 9), round(r.value.imag, 9)))
    out = RootSet(tuple(found))
    if out.total_multiplicity != p.degree:
        raise NoConvergence("root multiplicities do not add up to the degree")
    return out
