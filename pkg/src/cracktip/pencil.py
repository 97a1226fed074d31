"""Polynomial eigenfunctions of the quadratic crack-tip pencil.

The rescaled tip equation separates into the one-parameter family of ODEs

    (1 + z^2) psi'' + 2 (lam + 1) z psi' + lam (lam + 1) psi = 0,

whose polynomial solutions come in two discrete families: degree-d
polynomials with lam = -d (first family) and degree-d polynomials with
lam = -d - 1 (second family).  This module constructs them exactly, maps
the ODE to its symmetric Sturm-Liouville form, and extracts nodal sets,
which downstream modules interpret as admissible crack slopes.

All coefficients are produced by a two-step downward recursion from the
monic leading term, in exact rational arithmetic for moderate degrees, so
the classical low-degree table is reproduced without rounding.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Optional, Sequence, Tuple

import numpy as np

from .errors import NumericsError, RootFindingError

# Exact rational coefficients are kept up to this degree; beyond it the
# recursion runs directly in floating point.
_EXACT_DEGREE_LIMIT = 64

DEFAULT_TRANSVERSALITY_TOL = 1e-8


class Family(enum.Enum):
    """The two eigenfunction families of the quadratic pencil."""

    FIRST = "first"
    SECOND = "second"

    @classmethod
    def parse(cls, text: str) -> "Family":
        try:
            return cls(text.strip().lower())
        except ValueError:
            raise ValueError(f"unknown family {text!r}; expected 'first' or 'second'")


@dataclass(frozen=True)
class Polynomial:
    """Dense real polynomial; ``coeffs[k]`` multiplies ``z**k``.

    ``exact`` carries the rational coefficients when the polynomial was
    produced by the exact recursion; it is None for generic combinations.
    """

    coeffs: Tuple[float, ...]
    exact: Optional[Tuple[Fraction, ...]] = field(default=None, compare=False)

    def __post_init__(self):
        if len(self.coeffs) == 0:
            raise ValueError("polynomial needs at least one coefficient")
        if self.degree > 0 and self.coeffs[-1] == 0.0:
            raise ValueError("leading coefficient must be nonzero")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, z):
        acc = 0.0
        for c in reversed(self.coeffs):
            acc = acc * z + c
        return acc

    def derivative(self) -> "Polynomial":
        if self.degree == 0:
            return Polynomial((0.0,))
        d = tuple(k * c for k, c in enumerate(self.coeffs))[1:]
        return Polynomial(d if d[-1] != 0.0 else _trim(d))

    def scaled(self, factor: float) -> "Polynomial":
        return Polynomial(tuple(factor * c for c in self.coeffs))


def _trim(coeffs: Sequence[float]) -> Tuple[float, ...]:
    out = list(coeffs)
    while len(out) > 1 and out[-1] == 0.0:
        out.pop()
    return tuple(out)


@dataclass(frozen=True)
class PencilEigenpair:
    """A pencil eigenvalue with its monic polynomial eigenfunction."""

    degree: int
    family: Family
    lam: float
    poly: Polynomial


@dataclass(frozen=True)
class SturmLiouvilleImage:
    """Parameters of the symmetric reduction of the pencil ODE.

    Substituting psi = (1 + z^2)**gamma * phi with gamma = -(lam+1)/2 turns
    the pencil equation into  -(1+z^2)^2 phi'' = mu phi  with
    mu = (lam+1)(lam-1); the pencil's own symmetric form carries the weight
    (1+z^2)**(lam+1).
    """

    gamma: float
    mu: float
    weight_exponent: float


@dataclass(frozen=True)
class NodalSet:
    """Sorted real zeros of a polynomial with transversality annotations."""

    zeros: Tuple[float, ...]
    derivative_magnitudes: Tuple[float, ...]
    transversal: Tuple[bool, ...]
    tol: float

    def __len__(self) -> int:
        return len(self.zeros)

    @property
    def all_transversal(self) -> bool:
        return all(self.transversal)


def pencil_eigenvalues(l: int) -> Tuple[float, float]:
    """Both eigenvalues attached to index l: the roots of
    lam^2 + (2l+1) lam + l(l+1), i.e. (-l, -l-1).

    l = 0 is rejected: the first family starts at the non-vanishing
    constant mode, which callers must treat separately.
    """
    if l < 1:
        raise ValueError("index l must be >= 1 (l = 0 is the constant mode)")
    return (-float(l), -float(l) - 1.0)


def family_eigenvalue(degree: int, family: Family) -> float:
    """Eigenvalue paired with a degree-``degree`` eigenfunction."""
    if degree < 0:
        raise ValueError("degree must be nonnegative")
    if family is Family.FIRST:
        return -float(degree)
    return -float(degree) - 1.0


def _exact_recursion(degree: int, lam: int) -> Tuple[Fraction, ...]:
    coeffs = [Fraction(0)] * (degree + 1)
    coeffs[degree] = Fraction(1)
    k = degree - 2
    while k >= 0:
        denom = (k + lam) * (k + lam + 1)
        if denom == 0:
            raise NumericsError(
                f"recursion denominator vanished at k={k}, lam={lam}; "
                "(degree, family) pair is not an admissible eigenpair"
            )
        coeffs[k] = Fraction(-(k + 2) * (k + 1), denom) * coeffs[k + 2]
        k -= 2
    return tuple(coeffs)


def _float_recursion(degree: int, lam: float) -> Tuple[float, ...]:
    coeffs = [0.0] * (degree + 1)
    coeffs[degree] = 1.0
    k = degree - 2
    while k >= 0:
        denom = (k + lam) * (k + lam + 1)
        if denom == 0.0:
            raise NumericsError(
                f"recursion denominator vanished at k={k}, lam={lam}"
            )
        coeffs[k] = -(k + 2) * (k + 1) / denom * coeffs[k + 2]
        k -= 2
    return tuple(coeffs)


@lru_cache(maxsize=1024)
def build_eigenfunction(degree: int, family: Family) -> PencilEigenpair:
    """Construct the monic degree-``degree`` eigenfunction of ``family``.

    The recursion runs downward from the leading coefficient,
    a_k = -(k+2)(k+1) / ((k+lam)(k+lam+1)) * a_{k+2}, which only touches
    coefficients of the same parity as the degree; the opposite-parity
    coefficients are identically zero.
    """
    if degree < 0:
        raise ValueError("degree must be nonnegative")
    lam_int = -degree if family is Family.FIRST else -degree - 1
    if degree <= _EXACT_DEGREE_LIMIT:
        exact = _exact_recursion(degree, lam_int)
        coeffs = tuple(float(c) for c in exact)
        poly = Polynomial(coeffs, exact=exact)
    else:
        poly = Polynomial(_float_recursion(degree, float(lam_int)))
    return PencilEigenpair(degree=degree, family=family, lam=float(lam_int), poly=poly)


def pencil_ode_residual(poly: Polynomial, lam: float, z):
    """(1+z^2) psi'' + 2(lam+1) z psi' + lam(lam+1) psi at ``z``."""
    d1 = poly.derivative()
    d2 = d1.derivative()
    return (1.0 + z * z) * d2(z) + 2.0 * (lam + 1.0) * z * d1(z) + lam * (lam + 1.0) * poly(z)


def pencil_residual(pair: PencilEigenpair, z):
    """ODE residual of an eigenpair; at rounding level for exact pairs."""
    return pencil_ode_residual(pair.poly, pair.lam, z)


def sturm_liouville_map(lam: float) -> SturmLiouvilleImage:
    return SturmLiouvilleImage(
        gamma=-(lam + 1.0) / 2.0,
        mu=(lam + 1.0) * (lam - 1.0),
        weight_exponent=lam + 1.0,
    )


def _polish_real_root(coeffs_desc: np.ndarray, deriv_desc: np.ndarray, x: float) -> float:
    for _ in range(3):
        p = np.polyval(coeffs_desc, x)
        dp = np.polyval(deriv_desc, x)
        if dp == 0.0:
            break
        step = p / dp
        if not math.isfinite(step):
            break
        x -= step
        if abs(step) <= 1e-16 * (1.0 + abs(x)):
            break
    return x


def nodal_set(poly: Polynomial, tol: float = DEFAULT_TRANSVERSALITY_TOL) -> NodalSet:
    """All real zeros of ``poly``, sorted, each annotated with |poly'|.

    Companion-matrix eigenvalues followed by Newton polishing; roots whose
    imaginary part is below 1e-9 * (1 + |root|) count as real.  Clusters
    closer than the same threshold are merged (a multiple root appears
    once, flagged non-transversal through its derivative magnitude).
    """
    if all(c == 0.0 for c in poly.coeffs):
        raise ValueError("nodal_set of the zero polynomial is undefined")
    if poly.degree == 0:
        return NodalSet((), (), (), tol)
    desc = np.array(poly.coeffs[::-1], dtype=float)
    deriv = np.polyder(desc)
    raw = np.roots(desc)
    real = []
    for r in raw:
        if abs(r.imag) <= 1e-9 * (1.0 + abs(r)):
            real.append(_polish_real_root(desc, deriv, float(r.real)))
    real.sort()
    merged = []
    for r in real:
        if merged and abs(r - merged[-1]) <= 1e-9 * (1.0 + abs(r)):
            continue
        merged.append(r)
    scale = sum(abs(c) for c in poly.coeffs)
    for r in merged:
        bound = 1e-6 * scale * max(1.0, abs(r)) ** poly.degree
        if abs(np.polyval(desc, r)) > bound:
            raise RootFindingError(
                f"root {r!r} failed to converge: |p(r)| = {abs(np.polyval(desc, r))!r} "
                f"exceeds bound {bound!r}"
            )
    dmags = tuple(abs(float(np.polyval(deriv, r))) for r in merged)
    flags = tuple(m > tol for m in dmags)
    return NodalSet(tuple(merged), dmags, flags, tol)


def combine(c: float, d: float, l: int) -> Polynomial:
    """c * (first family, degree l) + d * (second family, degree l-1).

    Both constituents share the eigenvalue -l, so any such combination
    solves the same pencil ODE; its zeros are candidate crack slopes.
    """
    if l < 1:
        raise ValueError("l must be >= 1")
    if c == 0.0 and d == 0.0:
        raise ValueError("combination requires c^2 + d^2 != 0")
    p1 = build_eigenfunction(l, Family.FIRST).poly
    p2 = build_eigenfunction(l - 1, Family.SECOND).poly
    n = max(len(p1.coeffs), len(p2.coeffs))
    out = [0.0] * n
    for k, v in enumerate(p1.coeffs):
        out[k] += c * v
    for k, v in enumerate(p2.coeffs):
        out[k] += d * v
    return Polynomial(_trim(out))


def blowup_coordinates(x: float, y: float) -> Tuple[float, float]:
    """Map (x, y) with y < 0 to the tip variables z = x/(-y), tau = -ln(-y)."""
    if y >= 0.0:
        raise ValueError("blow-up coordinates require y < 0")
    return x / (-y), -math.log(-y)


def evaluate_expansion(terms: Sequence[Tuple[int, float, float]], z: float, tau: float) -> float:
    """Sum of exp(-k tau) * [c_k * psi_{k,1} + d_k * psi_{k-1,2}] at (z, tau).

    ``terms`` is a finite list of (k, c_k, d_k) with k >= 1.
    """
    total = 0.0
    for k, ck, dk in terms:
        if k < 1:
            raise ValueError("expansion indices must satisfy k >= 1")
        p1 = build_eigenfunction(k, Family.FIRST).poly
        p2 = build_eigenfunction(k - 1, Family.SECOND).poly
        total += math.exp(-k * tau) * (ck * p1(z) + dk * p2(z))
    return total
