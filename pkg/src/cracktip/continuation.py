"""Eigenvalue branches in the medium exponent n and their fold points.

Each index l >= 2 carries two real eigenvalue branches, seeded at n = 0 by
the classical exponents -l (upper) and -l-1 (lower).  As n grows the
branches move toward each other and annihilate at a saddle-node point
n_l*, beyond which the characteristic quartic has no real roots near the
pair.  l = 1 is the exception: Lam = -1 is a root for every n, the second
branch crosses it at n = 1/2, and real eigenvalues persist for all n.

Because the quartic is affine in n, folds satisfy a closed 2x2 polynomial
system (Phi = 0, dPhi/dLam = 0) with an analytic Jacobian, so they are
located by Newton iteration to essentially machine precision after a
root-count bisection supplies the seed.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from .characteristic import affine_parts, build_quartic, real_roots
from .errors import NoFoldInBracketError, NumericsError


class BranchFamily(enum.Enum):
    UPPER = "upper"   # seeded at -l
    LOWER = "lower"   # seeded at -l - 1

    @classmethod
    def parse(cls, text: str) -> "BranchFamily":
        try:
            return cls(text.strip().lower())
        except ValueError:
            raise ValueError(f"unknown branch family {text!r}; expected 'upper' or 'lower'")


@dataclass(frozen=True)
class FoldPoint:
    """A parameter value where two real eigenvalues merge.

    ``kind`` is "fold" for a genuine pair annihilation and "crossing" for
    the l = 1 double root, where real eigenvalues survive on both sides.
    """

    l: int
    n_star: float
    lambda_star: float
    residual_phi: float
    residual_dphi: float
    second_derivative: float
    kind: str = "fold"


@dataclass(frozen=True)
class Branch:
    l: int
    family: BranchFamily
    samples: Tuple[Tuple[float, float], ...]
    fold: Optional[FoldPoint]
    reached_n_max: bool


def _phi_and_derivs(l: int, lam: float, n: float):
    A, B = affine_parts(l)
    dA, dB = np.polyder(A), np.polyder(B)
    phi = np.polyval(A, lam) + n * np.polyval(B, lam)
    phi_lam = np.polyval(dA, lam) + n * np.polyval(dB, lam)
    return phi, phi_lam


def _phi_scale(l: int, lam: float, n: float) -> float:
    q = build_quartic(l, n)
    m = max(1.0, abs(lam))
    return sum(abs(c) * m ** (4 - k) for k, c in enumerate(q.coeffs))


def _newton_lambda(l: int, n: float, lam: float, max_iter: int = 30) -> Optional[float]:
    """Corrector: 1-D Newton on Phi(. ; n) = 0 from ``lam``.

    The acceptance scale is re-evaluated at the current iterate so a wild
    starting point cannot inflate the tolerance.
    """
    for _ in range(max_iter):
        phi, phi_lam = _phi_and_derivs(l, lam, n)
        if abs(phi) <= 1e-13 * _phi_scale(l, lam, n):
            return lam
        if phi_lam == 0.0:
            return None
        step = phi / phi_lam
        if not np.isfinite(step) or abs(step) > 1.0 + abs(lam):
            return None
        lam -= step
        if abs(step) <= 1e-15 * (1.0 + abs(lam)):
            phi, _ = _phi_and_derivs(l, lam, n)
            return lam if abs(phi) <= 1e-10 * _phi_scale(l, lam, n) else None
    return None


def continue_branch(
    l: int,
    family: BranchFamily,
    n_max: float,
    initial_step: float = 1e-3,
    min_step: float = 1e-9,
    growth: float = 1.4,
) -> Branch:
    """Natural-parameter predictor-corrector continuation of one branch.

    The predictor uses the exact implicit-function slope -Phi_n / Phi_Lam;
    the corrector is Newton in Lam at fixed n.  The step halves on
    corrector failure down to ``min_step``; hitting the floor is treated
    as fold proximity and hands off to :func:`find_fold`.
    """
    if l < 1:
        raise ValueError("l must be >= 1")
    if n_max <= 0.0:
        raise ValueError("n_max must be positive")
    seed = -float(l) if family is BranchFamily.UPPER else -float(l) - 1.0
    samples: List[Tuple[float, float]] = [(0.0, seed)]
    n, lam = 0.0, seed
    step = initial_step
    while n < n_max:
        dn = min(step, n_max - n)
        advanced = False
        while True:
            n_try = n + dn
            phi, phi_lam = _phi_and_derivs(l, lam, n)
            slope = 0.0 if phi_lam == 0.0 else -np.polyval(affine_parts(l)[1], lam) / phi_lam
            # a predictor jump beyond the root's basin means the step is
            # too large for the local curvature; shrink before correcting
            if abs(dn * slope) <= 0.25 * (1.0 + abs(lam)):
                lam_pred = lam + dn * slope
                lam_corr = _newton_lambda(l, n_try, lam_pred)
                if lam_corr is not None and abs(lam_corr - lam) <= 0.5 * (1.0 + abs(lam)):
                    n, lam = n_try, lam_corr
                    samples.append((n, lam))
                    step = min(dn * growth, 0.05)
                    advanced = True
                    break
            dn *= 0.5
            if dn < min_step:
                break
        if not advanced:
            # Step floor reached: a fold is closer than min_step.
            try:
                fold = find_fold(l, bracket=(max(samples[-1][0] * 0.5, min_step), n_max))
            except NoFoldInBracketError as exc:
                raise NumericsError(
                    f"corrector diverged at n={samples[-1][0]!r} with no fold in "
                    f"reach; last good sample (n, lambda) = {samples[-1]!r}"
                ) from exc
            return Branch(l, family, tuple(samples), fold, reached_n_max=False)
    return Branch(l, family, tuple(samples), None, reached_n_max=True)


def _count_tracked_roots(l: int, n: float) -> int:
    """Real roots inside the window where the seeded pair lives."""
    roots = real_roots(build_quartic(l, n))
    lo, hi = -float(l) - 2.0, -float(l) + 0.5
    return sum(1 for r in roots if lo < r < hi)


def _newton_fold(l: int, lam: float, n: float, deflate_l1: bool = False):
    """Newton on (Phi, Phi_Lam) = 0 with the analytic 2x2 Jacobian.

    For l = 1, Lam = -1 is a root of Phi for every n, which makes the raw
    system rank-deficient at its solution; dividing that factor out
    restores a regular root, so the same iteration converges quadratically.
    """
    A, B = affine_parts(l)
    if deflate_l1:
        # synthetic division of A, B by (Lam + 1); remainders vanish exactly
        A = _deflate_at_minus_one(A)
        B = _deflate_at_minus_one(B)
    dA, dB = np.polyder(A), np.polyder(B)
    d2A, d2B = np.polyder(A, 2), np.polyder(B, 2)
    for _ in range(80):
        f1 = np.polyval(A, lam) + n * np.polyval(B, lam)
        d1 = np.polyval(dA, lam) + n * np.polyval(dB, lam)
        if deflate_l1:
            # second equation stays dPhi/dLam of the full quartic
            f2 = f1 + (lam + 1.0) * d1
            j21 = 2.0 * d1 + (lam + 1.0) * (np.polyval(d2A, lam) + n * np.polyval(d2B, lam))
            j22 = np.polyval(B, lam) + (lam + 1.0) * np.polyval(dB, lam)
        else:
            f2 = d1
            j21 = np.polyval(d2A, lam) + n * np.polyval(d2B, lam)
            j22 = np.polyval(dB, lam)
        j11 = d1 if not deflate_l1 else np.polyval(dA, lam) + n * np.polyval(dB, lam)
        j12 = np.polyval(B, lam)
        J = np.array([[j11, j12], [j21, j22]])
        try:
            delta = np.linalg.solve(J, -np.array([f1, f2]))
        except np.linalg.LinAlgError:
            delta, *_ = np.linalg.lstsq(J, -np.array([f1, f2]), rcond=None)
        lam += delta[0]
        n += delta[1]
        if max(abs(delta[0]), abs(delta[1])) <= 1e-15 * (1.0 + abs(lam) + abs(n)):
            break
    return lam, n


def _deflate_at_minus_one(coeffs: np.ndarray) -> np.ndarray:
    quot, rem = np.polydiv(coeffs, np.array([1.0, 1.0]))
    if abs(rem[0]) > 1e-9 * np.abs(coeffs).sum():
        raise NumericsError("expected (Lam + 1) to divide the l = 1 quartic exactly")
    return quot


def find_fold(l: int, bracket: Optional[Tuple[float, float]] = None) -> FoldPoint:
    """Locate the fold of index l by root-count bisection plus 2x2 Newton.

    Without an explicit bracket, a geometric scan (factor 1.3 from 1e-6 up
    to 1) looks for the n at which the tracked real-root pair disappears;
    the bracket is bisected to width 1e-8 before Newton takes over.
    """
    if l < 1:
        raise ValueError("l must be >= 1")
    if bracket is None:
        grid = [0.0]
        x = 1e-6
        while x <= 1.0:
            grid.append(x)
            x *= 1.3
        grid.append(1.0)
        lo = None
        for a, b in zip(grid, grid[1:]):
            if _count_tracked_roots(l, a) >= 2 and _count_tracked_roots(l, b) < 2:
                lo, hi = a, b
                break
        if lo is None:
            raise NoFoldInBracketError(
                f"no change in tracked real-root count for l={l} on (0, 1]"
            )
    else:
        lo, hi = bracket
        if not (_count_tracked_roots(l, lo) >= 2 and _count_tracked_roots(l, hi) < 2):
            raise NoFoldInBracketError(
                f"root count does not drop from 2 inside bracket {bracket!r} for l={l}"
            )
    while hi - lo > 1e-8:
        mid = 0.5 * (lo + hi)
        if _count_tracked_roots(l, mid) >= 2:
            lo = mid
        else:
            hi = mid
    n_seed = 0.5 * (lo + hi)
    pair = [r for r in real_roots(build_quartic(l, lo)) if -l - 2.0 < r < -l + 0.5]
    lam_seed = float(np.mean(pair)) if pair else -float(l) - 0.5
    lam, n = _newton_fold(l, lam_seed, n_seed)
    q = build_quartic(l, n)
    res_phi, res_dphi = abs(q(lam)), abs(q.d_dlam(lam))
    second = q.d2_dlam2(lam)
    if second == 0.0:
        raise NumericsError(f"fold for l={l} is not quadratic (Phi_LamLam = 0)")
    return FoldPoint(
        l=l,
        n_star=float(n),
        lambda_star=float(lam),
        residual_phi=float(res_phi),
        residual_dphi=float(res_dphi),
        second_derivative=float(second),
        kind="fold",
    )


def double_root_l1() -> FoldPoint:
    """The l = 1 double root: Lam = -1 is persistent, and the second branch
    crosses it at n = 1/2.  Real roots survive on both sides, so the point
    is reported as a crossing rather than a fold."""
    lam, n = _newton_fold(1, -1.05, 0.42, deflate_l1=True)
    q = build_quartic(1, n)
    return FoldPoint(
        l=1,
        n_star=float(n),
        lambda_star=float(lam),
        residual_phi=abs(q(lam)),
        residual_dphi=abs(q.d_dlam(lam)),
        second_derivative=q.d2_dlam2(lam),
        kind="crossing",
    )
