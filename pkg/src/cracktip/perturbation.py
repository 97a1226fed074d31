"""First-order branching of the nonlinear tip eigenpairs at n = 0.

Writing Lam = lam + n mu + o(n) and Psi = psi + n phi + o(n) around a
classical eigenpair (psi, lam), the order-n balance reads

    Bstar phi = h(mu, psi, lam)
              = -[Phi2(psi, lam) + mu ((2 lam + 1) psi + z psi')
                 + Phi1(psi, lam) * L psi],

with Bstar the pencil operator, L psi = -psi'' on eigenfunctions, and
Phi1, Phi2 the rational gradient couplings of the quasilinear equation.
Two independent routes to the slope mu are provided:

* ``mu_via_ift``: the implicit-function slope -Phi_n / Phi_Lam of the
  characteristic quartic at the seed, exact up to rounding.  This is the
  authoritative value: it is the slope the continuation branches realize.
* ``mu_via_quadrature``: the Fredholm orthogonality route, solving
  integral of  w(z) h(mu, psi, lam)(z) psi(z) dz = 0  with weight
  w = (1 + z^2)^lam on a truncated window.  For first-family seeds the
  integrand tends to a nonzero constant, so the result carries a
  divergent-tail flag instead of being trusted.

The two routes do not agree: the quadrature slope solves the orthogonality
condition exactly (it converges, e.g., to 1/2 for the second-family seeds
at l = 2 and 3), while the quartic slopes there are 12/5 and 21/5.  The
discrepancy is structural, not numerical; keep ``mu_via_ift`` for anything
that must be consistent with the continuation module.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
import scipy.integrate
import scipy.sparse
import scipy.sparse.linalg

from .characteristic import affine_parts
from .errors import DegenerateSeedError, GradientDegeneracyError, NumericsError
from .pencil import Family, PencilEigenpair, build_eigenfunction, family_eigenvalue


@dataclass(frozen=True)
class Weight:
    """The eigenvalue-dependent weight (1+z^2)^(lam+1) of the symmetric form."""

    lam: float

    @property
    def exponent(self) -> float:
        return self.lam + 1.0

    def __call__(self, z):
        return (1.0 + z * z) ** self.exponent


def phi1(psi, dpsi, lam, z):
    """First rational gradient coupling: g^2 / (psi'^2 + g^2), g = lam psi + z psi'."""
    g = lam * psi + z * dpsi
    den = dpsi * dpsi + g * g
    if np.any(den == 0.0):
        raise GradientDegeneracyError("gradient degeneracy: psi' and lam psi + z psi' both vanish")
    return g * g / den


def phi2(psi, dpsi, ddpsi, lam, z):
    """Second coupling: (psi'^2 psi'' + 2 psi' g (lam psi' + z psi'')) / (psi'^2 + g^2)."""
    g = lam * psi + z * dpsi
    den = dpsi * dpsi + g * g
    if np.any(den == 0.0):
        raise GradientDegeneracyError("gradient degeneracy: psi' and lam psi + z psi' both vanish")
    return (dpsi * dpsi * ddpsi + 2.0 * dpsi * g * (lam * dpsi + z * ddpsi)) / den


def source_h(mu: float, pair: PencilEigenpair, z):
    """Order-n source term h(mu, psi, lam) at ``z`` (scalar or array).

    Affine in mu with slope -((2 lam + 1) psi + z psi'); uses L psi = -psi''.
    """
    lam = pair.lam
    p = pair.poly
    d1 = p.derivative()
    d2 = d1.derivative()
    psi, dpsi, ddpsi = p(z), d1(z), d2(z)
    f1 = phi1(psi, dpsi, lam, z)
    f2 = phi2(psi, dpsi, ddpsi, lam, z)
    return -(f2 + mu * ((2.0 * lam + 1.0) * psi + z * dpsi) + f1 * (-ddpsi))


def _seed(l: int, family: Family) -> Tuple[float, PencilEigenpair]:
    """Seed eigenvalue and degree-l eigenfunction for branch (l, family)."""
    lam = family_eigenvalue(l, family)
    return lam, build_eigenfunction(l, family)


def mu_via_ift(l: int, family: Family) -> float:
    """Branch slope at n = 0 from the characteristic quartic.

    mu = -Phi_n / Phi_Lam at (lam_seed, 0), both partials in closed form.
    """
    if l < 1:
        raise ValueError("l must be >= 1")
    lam, _ = _seed(l, family)
    A, B = affine_parts(l)
    phi_lam = np.polyval(np.polyder(A), lam)
    if abs(phi_lam) < 1e-12 * np.abs(A).sum():
        raise DegenerateSeedError(f"degenerate seed: {lam} is not a simple root of index {l}")
    return float(-np.polyval(B, lam) / phi_lam)


@dataclass(frozen=True)
class QuadratureDiagnostics:
    """Tail behaviour of the orthogonality integrals over widening windows."""

    windows: Tuple[float, ...]
    mu_values: Tuple[float, ...]
    tail_magnitudes: Tuple[float, ...]
    divergent_tail: bool
    converged: bool


def mu_via_quadrature(
    l: int,
    family: Family,
    z_cut: float = 200.0,
    tail_tol: float = 1e-6,
    max_windows: int = 8,
) -> Tuple[float, QuadratureDiagnostics]:
    """Slope from the Fredholm orthogonality condition on [-Z, Z].

    The condition is affine in mu:  I_rest + mu * I_mu = 0  with

        I_rest = int w (Phi2 + Phi1 L psi) psi dz,
        I_mu   = int w ((2 lam + 1) psi + z psi') psi dz,   w = (1+z^2)^lam.

    Z starts at ``z_cut`` and doubles until the integrand magnitude at the
    window edge falls below ``tail_tol`` (a 1/z^2 tail reaches it quickly)
    or until the edge samples stop decaying, which marks the first-family
    seeds whose integrand tends to a nonzero constant: those results are
    flagged divergent rather than trusted.  The truncation error of a
    convergent window decays like 1/Z, so the returned value is the
    Richardson extrapolation of the last two windows.
    """
    lam, pair = _seed(l, family)
    p = pair.poly
    d1 = p.derivative()
    d2 = d1.derivative()

    def integrand_rest(z):
        psi, dpsi, ddpsi = p(z), d1(z), d2(z)
        w = (1.0 + z * z) ** lam
        f1 = phi1(psi, dpsi, lam, z)
        f2 = phi2(psi, dpsi, ddpsi, lam, z)
        return w * (f2 + f1 * (-ddpsi)) * psi

    def integrand_mu(z):
        psi, dpsi = p(z), d1(z)
        w = (1.0 + z * z) ** lam
        return w * ((2.0 * lam + 1.0) * psi + z * dpsi) * psi

    windows, mus, tails = [], [], []
    Z = z_cut
    divergent = False
    converged = False
    while len(windows) < max_windows:
        i_rest, _ = scipy.integrate.quad(integrand_rest, -Z, Z, limit=400)
        i_mu, _ = scipy.integrate.quad(integrand_mu, -Z, Z, limit=400)
        if i_mu == 0.0:
            raise NumericsError("orthogonality degenerate: the mu-coefficient integral vanishes")
        windows.append(Z)
        mus.append(-i_rest / i_mu)
        tails.append(abs(integrand_rest(Z)) + abs(integrand_mu(Z)))
        if len(tails) >= 3 and not all(
            tails[i + 1] <= 0.6 * tails[i] for i in range(len(tails) - 1)
        ):
            divergent = tails[-1] > 1e-12
            break
        if len(windows) >= 2 and tails[-1] <= tail_tol:
            converged = True
            break
        Z *= 2.0
    if divergent or len(mus) < 2:
        mu = float(mus[-1])
    else:
        mu = float(2.0 * mus[-1] - mus[-2])
    diag = QuadratureDiagnostics(
        windows=tuple(windows),
        mu_values=tuple(mus),
        tail_magnitudes=tuple(tails),
        divergent_tail=bool(divergent),
        converged=bool(converged and not divergent),
    )
    return mu, diag


@dataclass(frozen=True)
class CorrectionSolution:
    """Sampled first eigenfunction correction with solve diagnostics.

    ``resonance_amplitude`` is the coefficient of the left-null direction
    removed by the bordered solve; it vanishes (to discretization error)
    exactly when mu satisfies the orthogonality condition.
    """

    l: int
    family: Family
    mu: float
    z: np.ndarray
    phi: np.ndarray
    interior_residual_max: float
    resonance_amplitude: float
    orthogonality_value: float


@dataclass(frozen=True)
class BranchingData:
    l: int
    family: Family
    lam: float
    mu: float
    mu_method: str  # "implicit-function" or "quadrature"
    correction: Optional[CorrectionSolution] = None


def branching_data(
    l: int,
    family: Family,
    method: str = "implicit-function",
    with_correction: bool = False,
) -> BranchingData:
    """Bundle the first-order branching results for one seed."""
    lam, _ = _seed(l, family)
    if method == "implicit-function":
        mu = mu_via_ift(l, family)
    elif method == "quadrature":
        mu, diag = mu_via_quadrature(l, family)
        if diag.divergent_tail:
            raise NumericsError(
                f"quadrature slope for l={l}, {family.value} has a divergent tail"
            )
    else:
        raise ValueError("method must be 'implicit-function' or 'quadrature'")
    corr = solve_correction(l, family, mu) if with_correction else None
    return BranchingData(l=l, family=family, lam=lam, mu=mu, mu_method=method, correction=corr)


def solve_correction(
    l: int,
    family: Family,
    mu: float,
    z_cut: float = 50.0,
    num_points: int = 4001,
) -> CorrectionSolution:
    """Finite-difference solve of  Bstar phi = h(mu)  on [-Z, Z].

    Second-order central differences inside, one-sided second-order rows at
    the two ends (no Dirichlet data: the far field is only constrained to
    follow the discrete equation), and the normalization
    int w phi psi / (1+z^2) dz = 0.  Because psi spans the kernel of Bstar,
    the system is solved in bordered form: an auxiliary unknown multiplies
    the left-null direction w psi / (1+z^2), making the matrix square and
    well conditioned.  A large resonance amplitude means the supplied mu
    does not satisfy the solvability condition.
    """
    if num_points < 9:
        raise ValueError("num_points too small for the boundary stencils")
    lam, pair = _seed(l, family)
    p = pair.poly
    z = np.linspace(-z_cut, z_cut, num_points)
    dz = z[1] - z[0]
    h = source_h(mu, pair, z)
    a = 1.0 + z * z
    b = 2.0 * (lam + 1.0) * z
    c0 = lam * (lam + 1.0)
    N = num_points
    rows, cols, vals = [], [], []

    def add(r, cl, v):
        rows.append(r)
        cols.append(cl)
        vals.append(v)

    inv_dz2 = 1.0 / (dz * dz)
    inv_2dz = 1.0 / (2.0 * dz)
    for i in range(1, N - 1):
        add(i, i - 1, a[i] * inv_dz2 - b[i] * inv_2dz)
        add(i, i, -2.0 * a[i] * inv_dz2 + c0)
        add(i, i + 1, a[i] * inv_dz2 + b[i] * inv_2dz)
    # one-sided second-order stencils at the window edges
    add(0, 0, 2.0 * a[0] * inv_dz2 - 3.0 * b[0] * inv_2dz + c0)
    add(0, 1, -5.0 * a[0] * inv_dz2 + 4.0 * b[0] * inv_2dz)
    add(0, 2, 4.0 * a[0] * inv_dz2 - b[0] * inv_2dz)
    add(0, 3, -a[0] * inv_dz2)
    add(N - 1, N - 1, 2.0 * a[-1] * inv_dz2 + 3.0 * b[-1] * inv_2dz + c0)
    add(N - 1, N - 2, -5.0 * a[-1] * inv_dz2 - 4.0 * b[-1] * inv_2dz)
    add(N - 1, N - 3, 4.0 * a[-1] * inv_dz2 + b[-1] * inv_2dz)
    add(N - 1, N - 4, -a[-1] * inv_dz2)

    psi_grid = p(z)
    null_dir = (1.0 + z * z) ** lam * psi_grid
    nn = np.linalg.norm(null_dir)
    if nn == 0.0:
        raise NumericsError("degenerate null direction")
    null_dir = null_dir / nn
    wtrap = np.full(N, dz)
    wtrap[0] = wtrap[-1] = 0.5 * dz
    constraint = wtrap * (1.0 + z * z) ** lam * psi_grid
    cn = np.linalg.norm(constraint)
    for i in range(N):
        add(i, N, null_dir[i])
    for j in range(N):
        add(N, j, constraint[j] / cn)

    A = scipy.sparse.csc_matrix((vals, (rows, cols)), shape=(N + 1, N + 1))
    rhs = np.concatenate([h, [0.0]])
    try:
        sol = scipy.sparse.linalg.spsolve(A, rhs)
    except RuntimeError as exc:  # pragma: no cover - factorization failure
        raise NumericsError(f"correction solve singular: {exc}") from exc
    if not np.all(np.isfinite(sol)):
        raise NumericsError("correction solve singular: non-finite solution")
    phi = sol[:N]
    s = float(sol[N])
    op_res = np.empty(N)
    op_interior = (
        a[1:-1] * (phi[:-2] - 2.0 * phi[1:-1] + phi[2:]) * inv_dz2
        + b[1:-1] * (phi[2:] - phi[:-2]) * inv_2dz
        + c0 * phi[1:-1]
    )
    op_res[1:-1] = op_interior - h[1:-1]
    op_res[0] = op_res[-1] = 0.0
    orth = float(np.dot(constraint, phi))
    return CorrectionSolution(
        l=l,
        family=family,
        mu=float(mu),
        z=z,
        phi=phi,
        interior_residual_max=float(np.abs(op_res[1:-1]).max()),
        resonance_amplitude=s,
        orthogonality_value=orth,
    )
