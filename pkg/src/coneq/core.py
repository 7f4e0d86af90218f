"""Scalars, vectors, matrices and tolerances shared by every other module.

Numbers run in one of two modes: exact rational arithmetic over
``fractions.Fraction`` ("rational") or binary64 floats ("float").  Every
container carries its mode, and operations that combine containers reject
mixed modes at entry.  Eigen-quantities that have no exact representation
(irrational Perron roots) may come back as floats even inside a rational
computation; comparison helpers degrade to tolerance-based tests whenever
either operand is a float.

Vertex indices are 1-based throughout the public API: supports, classes and
initial subsets are sets of integers drawn from {1, .., n}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

import numpy as np

Scalar = Union[Fraction, float]

RATIONAL = "rational"
FLOAT = "float"
MODES = (RATIONAL, FLOAT)


class InvalidInput(ValueError):
    """Malformed or out-of-contract data: negative entries, shape or mode
    mismatches, violated preconditions."""


class NumericFailure(RuntimeError):
    """A float computation could not reach the requested accuracy."""


@dataclass(frozen=True)
class Tolerance:
    """Numeric knobs used by the float lane.

    eq_tol      entrywise / residual equality threshold
    eig_tol     eigenvalue comparison threshold
    power_iters iteration cap for power-type loops
    """

    eq_tol: float = 1e-9
    eig_tol: float = 1e-8
    power_iters: int = 10000

    def __post_init__(self):
        if self.eq_tol <= 0 or self.eig_tol <= 0 or self.power_iters <= 0:
            raise InvalidInput("tolerance fields must be strictly positive")


DEFAULT_TOL = Tolerance()


# ---------------------------------------------------------------------------
# scalar helpers


def as_scalar(value, mode: str) -> Scalar:
    """Coerce ``value`` into the requested mode.

    Rational mode reads floats and numeric strings as *decimal* literals
    ("0.1" means 1/10, not the nearest binary double); strings of the form
    "p/q" are exact rationals in both modes.
    """
    if mode == RATIONAL:
        if isinstance(value, Fraction):
            return value
        if isinstance(value, bool):
            raise InvalidInput("booleans are not scalars")
        if isinstance(value, int):
            return Fraction(value)
        if isinstance(value, str):
            return Fraction(value)
        if isinstance(value, float):
            if not math.isfinite(value):
                raise InvalidInput("non-finite scalar")
            return Fraction(repr(value))
        raise InvalidInput(f"cannot read scalar of type {type(value).__name__}")
    if mode == FLOAT:
        if isinstance(value, str):
            value = Fraction(value)
        try:
            out = float(value)
        except (TypeError, ValueError) as exc:
            raise InvalidInput(f"cannot read scalar: {value!r}") from exc
        if not math.isfinite(out):
            raise InvalidInput("non-finite scalar")
        return out
    raise InvalidInput(f"unknown mode {mode!r}")


def zero(mode: str) -> Scalar:
    return Fraction(0) if mode == RATIONAL else 0.0


def one(mode: str) -> Scalar:
    return Fraction(1) if mode == RATIONAL else 1.0


def exact_fraction(s: Scalar) -> Fraction:
    """Binary-exact rationalization (floats map to their exact binary value)."""
    return s if isinstance(s, Fraction) else Fraction(s)


def format_scalar(s: Scalar):
    """JSON-friendly form: integers stay numbers, other rationals become
    'p/q' strings (never lossy floats), infinity becomes 'inf'."""
    if isinstance(s, Fraction):
        return f"{s.numerator}/{s.denominator}" if s.denominator != 1 else int(s)
    if math.isinf(s):
        return "inf"
    return s


def scalars_equal(a: Scalar, b: Scalar, tol: Tolerance = DEFAULT_TOL) -> bool:
    """Exact when both sides are rational, |a-b| <= eig_tol*max(1,|a|,|b|) otherwise."""
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a == b
    fa, fb = float(a), float(b)
    return abs(fa - fb) <= tol.eig_tol * max(1.0, abs(fa), abs(fb))


def scalar_lt(a: Scalar, b: Scalar, tol: Tolerance = DEFAULT_TOL) -> bool:
    if scalars_equal(a, b, tol):
        return False
    return a < b


def scalar_le(a: Scalar, b: Scalar, tol: Tolerance = DEFAULT_TOL) -> bool:
    return scalars_equal(a, b, tol) or a < b


@dataclass(frozen=True, order=False)
class SpectralPair:
    """(local spectral radius, order); compared lexicographically via lex_leq."""

    rho: Scalar
    order: int


def lex_leq(a: SpectralPair, b: SpectralPair, tol: Tolerance = DEFAULT_TOL) -> bool:
    if scalars_equal(a.rho, b.rho, tol):
        return a.order <= b.order
    return a.rho < b.rho


# ---------------------------------------------------------------------------
# vectors


def _read_entries(entries, mode) -> tuple:
    return tuple(as_scalar(e, mode) for e in entries)


@dataclass(frozen=True)
class RealVector:
    """A sign-unrestricted vector tagged with its numeric mode."""

    entries: tuple
    mode: str

    @staticmethod
    def make(entries: Iterable, mode: str = RATIONAL) -> "RealVector":
        return RealVector(_read_entries(entries, mode), mode)

    @property
    def n(self) -> int:
        return len(self.entries)

    def is_zero(self) -> bool:
        return all(e == 0 for e in self.entries)

    def inf_norm(self) -> Scalar:
        if not self.entries:
            return zero(self.mode)
        return max(abs(e) for e in self.entries)

    def to_numpy(self) -> np.ndarray:
        return np.array([float(e) for e in self.entries], dtype=float)


@dataclass(frozen=True)
class ConeVector:
    """A vector constrained to the nonnegative orthant.

    Negative entries are input errors, never clamped.  Membership of an index
    in the support requires an exactly nonzero entry in both modes.
    """

    entries: tuple
    mode: str

    def __post_init__(self):
        for e in self.entries:
            if e < 0:
                raise InvalidInput(f"negative entry {e} in nonnegative vector")

    @staticmethod
    def make(entries: Iterable, mode: str = RATIONAL) -> "ConeVector":
        return ConeVector(_read_entries(entries, mode), mode)

    @staticmethod
    def zero_vector(n: int, mode: str = RATIONAL) -> "ConeVector":
        return ConeVector(tuple(zero(mode) for _ in range(n)), mode)

    @staticmethod
    def unit(n: int, i: int, mode: str = RATIONAL) -> "ConeVector":
        """Standard basis vector e_i (1-based i)."""
        if not 1 <= i <= n:
            raise InvalidInput(f"unit index {i} outside 1..{n}")
        return ConeVector(
            tuple(one(mode) if k == i - 1 else zero(mode) for k in range(n)), mode
        )

    @property
    def n(self) -> int:
        return len(self.entries)

    def is_zero(self) -> bool:
        return all(e == 0 for e in self.entries)

    def inf_norm(self) -> Scalar:
        if not self.entries:
            return zero(self.mode)
        return max(self.entries)

    def as_real(self) -> RealVector:
        return RealVector(self.entries, self.mode)

    def to_numpy(self) -> np.ndarray:
        return np.array([float(e) for e in self.entries], dtype=float)


def support(v) -> frozenset:
    """{i : v_i != 0}, 1-based."""
    return frozenset(i + 1 for i, e in enumerate(v.entries) if e != 0)


def vec_add(a, b) -> tuple:
    return tuple(x + y for x, y in zip(a, b))


def vec_sub(a, b) -> tuple:
    return tuple(x - y for x, y in zip(a, b))


def vec_scale(c, a) -> tuple:
    return tuple(c * x for x in a)


def snap_cone(entries: Sequence, mode: str, tol: Tolerance = DEFAULT_TOL) -> ConeVector:
    """Wrap float entries that are nonnegative up to eq_tol noise as a ConeVector.

    Only for internally constructed vectors; genuinely negative entries still
    raise.  Rational entries are never snapped.
    """
    if mode == RATIONAL:
        return ConeVector(tuple(entries), mode)
    scale = max([1.0] + [abs(float(e)) for e in entries])
    out = []
    for e in entries:
        e = float(e)
        if e < 0:
            if -e > tol.eq_tol * scale:
                raise InvalidInput(f"negative entry {e} beyond snapping tolerance")
            e = 0.0
        out.append(e)
    return ConeVector(tuple(out), mode)


# ---------------------------------------------------------------------------
# matrices


@dataclass(frozen=True)
class NonnegMatrix:
    """A square entrywise-nonnegative matrix tagged with its numeric mode."""

    rows: tuple  # tuple of n tuples of Scalar
    mode: str

    def __post_init__(self):
        n = len(self.rows)
        for row in self.rows:
            if len(row) != n:
                raise InvalidInput("matrix must be square")
            for e in row:
                if e < 0:
                    raise InvalidInput(f"negative entry {e} in nonnegative matrix")

    @staticmethod
    def make(rows: Iterable[Iterable], mode: str = RATIONAL) -> "NonnegMatrix":
        return NonnegMatrix(tuple(_read_entries(r, mode) for r in rows), mode)

    @staticmethod
    def zero_matrix(n: int, mode: str = RATIONAL) -> "NonnegMatrix":
        z = zero(mode)
        return NonnegMatrix(tuple(tuple(z for _ in range(n)) for _ in range(n)), mode)

    @staticmethod
    def identity(n: int, mode: str = RATIONAL) -> "NonnegMatrix":
        z, o = zero(mode), one(mode)
        return NonnegMatrix(
            tuple(tuple(o if i == j else z for j in range(n)) for i in range(n)), mode
        )

    @property
    def n(self) -> int:
        return len(self.rows)

    def entry(self, i: int, j: int) -> Scalar:
        """1-based access."""
        return self.rows[i - 1][j - 1]

    def transpose(self) -> "NonnegMatrix":
        return NonnegMatrix(tuple(zip(*self.rows)) if self.rows else (), self.mode)

    def submatrix(self, indices: Sequence[int]) -> "NonnegMatrix":
        """Principal submatrix on the given sorted 1-based indices."""
        idx = [i - 1 for i in indices]
        return NonnegMatrix(
            tuple(tuple(self.rows[i][j] for j in idx) for i in idx), self.mode
        )

    def apply(self, entries: Sequence) -> tuple:
        """Matrix times column vector, on raw entry tuples."""
        return tuple(
            sum((a * x for a, x in zip(row, entries) if a != 0), zero(self.mode))
            for row in self.rows
        )

    def to_numpy(self) -> np.ndarray:
        return np.array([[float(e) for e in row] for row in self.rows], dtype=float)

    def to_float(self) -> "NonnegMatrix":
        if self.mode == FLOAT:
            return self
        return NonnegMatrix(
            tuple(tuple(float(e) for e in row) for row in self.rows), FLOAT
        )

    def to_rational_exact(self) -> "NonnegMatrix":
        """Binary-exact rationalization of a float matrix."""
        if self.mode == RATIONAL:
            return self
        return NonnegMatrix(
            tuple(tuple(Fraction(e) for e in row) for row in self.rows), RATIONAL
        )


def require_same_mode(*objs) -> str:
    modes = {o.mode for o in objs}
    if len(modes) != 1:
        raise InvalidInput(f"mixed numeric modes in one computation: {sorted(modes)}")
    return modes.pop()


def require_same_size(mat: NonnegMatrix, vec) -> None:
    if mat.n != vec.n:
        raise InvalidInput(f"dimension mismatch: matrix {mat.n}, vector {vec.n}")


def saturate(P: NonnegMatrix, x: ConeVector) -> ConeVector:
    """Apply (I + P)^(n-1) to x.

    The result has the same local spectral radius and order as x, and its
    support spans the smallest P-invariant face of the orthant containing x.
    When only that support is needed, use the class-graph closure instead;
    this dense form is for numeric cross-checks.
    """
    require_same_mode(P, x)
    require_same_size(P, x)
    entries = x.entries
    for _ in range(P.n - 1):
        entries = vec_add(entries, P.apply(entries))
    return ConeVector(entries, x.mode)


# ---------------------------------------------------------------------------
# exact / float dense linear solve (shared plumbing)


def solve_linear(rows: Sequence[Sequence], rhs: Sequence, mode: str):
    """Solve a square linear system; returns a list of entries or None if the
    matrix is singular (rational) / numerically singular (float)."""
    n = len(rhs)
    if mode == RATIONAL:
        a = [list(r) + [rhs[i]] for i, r in enumerate(rows)]
        for col in range(n):
            piv = next((r for r in range(col, n) if a[r][col] != 0), None)
            if piv is None:
                return None
            a[col], a[piv] = a[piv], a[col]
            inv = Fraction(1) / a[col][col]
            a[col] = [e * inv for e in a[col]]
            for r in range(n):
                if r != col and a[r][col] != 0:
                    f = a[r][col]
                    a[r] = [e - f * p for e, p in zip(a[r], a[col])]
        return [a[i][n] for i in range(n)]
    m = np.array([[float(e) for e in r] for r in rows], dtype=float)
    v = np.array([float(e) for e in rhs], dtype=float)
    try:
        sol = np.linalg.solve(m, v)
    except np.linalg.LinAlgError:
        return None
    if not np.all(np.isfinite(sol)):
        return None
    return [float(s) for s in sol]
