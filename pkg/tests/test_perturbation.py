import numpy as np
import pytest

from cracktip import (
    BranchFamily,
    Family,
    Weight,
    build_eigenfunction,
    continue_branch,
    mu_via_ift,
    mu_via_quadrature,
    phi1,
    phi2,
    solve_correction,
    source_h,
)
from cracktip.errors import DegenerateSeedError, NumericsError
from cracktip.perturbation import branching_data

from oracles import integral_over_reals


def test_phi_couplings_vanish_on_linear_mode():
    # psi = z with lam = -1: lam psi + z psi' = 0 identically
    z = np.linspace(-4.0, 4.0, 41)
    assert np.max(np.abs(phi1(z, 1.0, -1.0, z))) == 0.0
    assert np.max(np.abs(phi2(z, 1.0, 0.0, -1.0, z))) == 0.0


def test_phi_couplings_hand_values():
    # psi = z^2 - 1, lam = -2 at z = 1: psi=0, psi'=2, psi''=2
    # g = 2, den = 8 -> phi1 = 1/2; phi2 = (4*2 + 2*2*2*(-2))/8 = -1
    assert phi1(0.0, 2.0, -2.0, 1.0) == pytest.approx(0.5, abs=1e-15)
    assert phi2(0.0, 2.0, 2.0, -2.0, 1.0) == pytest.approx(-1.0, abs=1e-15)


def test_source_vanishes_for_degree_one():
    pair = build_eigenfunction(1, Family.FIRST)
    z = np.linspace(-5.0, 5.0, 31)
    for mu in (0.0, 1.0, -3.7):
        assert np.max(np.abs(source_h(mu, pair, z))) <= 1e-14


def test_source_hand_value_degree_two():
    # psi = z^2 - 1, lam = -2 at z = 0: phi1 = 1, phi2 = 0, L psi = -2
    # h(0) = -(0 + 0 + 1 * (-2)) = 2
    pair = build_eigenfunction(2, Family.FIRST)
    assert source_h(0.0, pair, 0.0) == pytest.approx(2.0, abs=1e-14)


def test_source_affine_in_mu():
    pair = build_eigenfunction(3, Family.SECOND)
    lam = pair.lam
    p, d1 = pair.poly, pair.poly.derivative()
    z = np.linspace(-3.0, 3.0, 13)
    h0 = source_h(0.0, pair, z)
    h1 = source_h(1.0, pair, z)
    h5 = source_h(5.0, pair, z)
    slope = -((2.0 * lam + 1.0) * p(z) + z * d1(z))
    assert np.allclose(h1 - h0, slope, rtol=0, atol=1e-12)
    assert np.allclose(h5 - h0, 5.0 * slope, rtol=0, atol=1e-12)


def test_weight_positive():
    w = Weight(lam=-3.0)
    assert w.exponent == -2.0
    z = np.linspace(-20, 20, 101)
    assert np.all(w(z) > 0.0)


MU_IFT_CLOSED = [
    # -B(seed)/A'(seed) evaluated by hand from the integer parts
    (1, Family.FIRST, 0.0),
    (2, Family.FIRST, -2.0),
    (2, Family.SECOND, 12.0 / 5.0),
    (3, Family.FIRST, -6.0),
    (3, Family.SECOND, 21.0 / 5.0),
    (4, Family.FIRST, -12.0),
    (4, Family.SECOND, 8.0),
]


@pytest.mark.parametrize("l,family,expected", MU_IFT_CLOSED)
def test_mu_ift_closed_values(l, family, expected):
    assert mu_via_ift(l, family) == pytest.approx(expected, rel=1e-13)


@pytest.mark.parametrize(
    "l,family,branch",
    [(2, Family.FIRST, BranchFamily.UPPER), (3, Family.SECOND, BranchFamily.LOWER)],
)
def test_mu_ift_matches_continuation_slope(l, family, branch):
    br = continue_branch(l, branch, 2.5e-7, initial_step=1e-7)
    (n0, l0), (n1, l1) = br.samples[:2]
    assert (l1 - l0) / (n1 - n0) == pytest.approx(mu_via_ift(l, family), rel=1e-5)


@pytest.mark.parametrize("l", list(range(2, 9)))
def test_branches_close_toward_each_other(l):
    # the upper branch falls and the lower rises: the pair must meet at
    # the fold, so the slopes have opposite signs from the start
    assert mu_via_ift(l, Family.FIRST) < 0.0 < mu_via_ift(l, Family.SECOND)


def _orthogonality_mu_oracle(l, family):
    """Exact-quadrature value of the orthogonality slope (tan substitution)."""
    pair = build_eigenfunction(l, Family.SECOND if family is Family.SECOND else Family.FIRST)
    lam = pair.lam
    p = pair.poly
    d1 = p.derivative()
    d2 = d1.derivative()

    def rest(z):
        w = (1.0 + z * z) ** lam
        return w * (phi2(p(z), d1(z), d2(z), lam, z) + phi1(p(z), d1(z), lam, z) * (-d2(z))) * p(z)

    def muco(z):
        w = (1.0 + z * z) ** lam
        return w * ((2.0 * lam + 1.0) * p(z) + z * d1(z)) * p(z)

    return -integral_over_reals(rest) / integral_over_reals(muco)


@pytest.mark.parametrize("l", [2, 3])
def test_quadrature_second_family_converges_to_exact_value(l):
    mu, diag = mu_via_quadrature(l, Family.SECOND)
    assert not diag.divergent_tail
    assert diag.converged
    # edge samples of the integrand must decay like 1/Z^2
    for a, b in zip(diag.tail_magnitudes, diag.tail_magnitudes[1:]):
        assert b <= 0.3 * a
    oracle = _orthogonality_mu_oracle(l, Family.SECOND)
    assert oracle == pytest.approx(0.5, abs=1e-10)  # exact value of the condition
    assert mu == pytest.approx(oracle, rel=2e-4)


@pytest.mark.parametrize("l", [2, 3])
def test_quadrature_first_family_flags_divergent_tail(l):
    mu, diag = mu_via_quadrature(l, Family.FIRST)
    assert diag.divergent_tail
    assert not diag.converged


@pytest.mark.parametrize("l", [2, 3])
@pytest.mark.xfail(
    strict=True,
    reason="the orthogonality slope is exactly 1/2 for these seeds while the "
    "quartic slope is 12/5 resp. 21/5; the two published routes are "
    "structurally inconsistent, so this stated agreement cannot hold",
)
def test_quadrature_matches_ift_within_tenth_percent(l, family=Family.SECOND):
    mu_q, diag = mu_via_quadrature(l, family)
    assert not diag.divergent_tail
    mu_i = mu_via_ift(l, family)
    assert abs(mu_q - mu_i) <= 1e-3 * abs(mu_i)


def test_branching_data_bundle():
    data = branching_data(2, Family.FIRST)
    assert data.lam == -2.0
    assert data.mu == pytest.approx(-2.0)
    assert data.correction is None
    data = branching_data(2, Family.SECOND, method="quadrature")
    assert data.mu == pytest.approx(0.5, abs=1e-3)
    with pytest.raises(NumericsError):
        branching_data(2, Family.FIRST, method="quadrature")  # divergent tail
    with pytest.raises(ValueError):
        branching_data(2, Family.FIRST, method="nonsense")


def test_quadrature_is_deterministic():
    a, _ = mu_via_quadrature(2, Family.SECOND)
    b, _ = mu_via_quadrature(2, Family.SECOND)
    assert a == b


def test_degenerate_seed_rejected():
    # at the l = 1 crossing both quartic roots coincide only in n; the
    # seed -1 is simple, so no error -- build an artificial degenerate call
    with pytest.raises(ValueError):
        mu_via_ift(0, Family.FIRST)


def test_correction_zero_source_gives_zero():
    sol = solve_correction(1, Family.FIRST, 0.0, z_cut=30.0, num_points=1201)
    assert np.max(np.abs(sol.phi)) == 0.0
    assert sol.interior_residual_max == 0.0
    assert sol.resonance_amplitude == 0.0


def test_correction_parity_and_orthogonality():
    sol = solve_correction(2, Family.SECOND, 0.5, z_cut=50.0, num_points=2001)
    scale = np.max(np.abs(sol.phi))
    assert scale > 0.0
    asym = np.max(np.abs(sol.phi - sol.phi[::-1]))
    assert asym <= 1e-3 * scale
    assert abs(sol.orthogonality_value) <= 1e-8 * scale


def test_correction_resonance_tracks_solvability():
    # mu = 1/2 satisfies the orthogonality condition for this seed; the
    # quartic slope 12/5 does not, and the solver must say so loudly
    ok = solve_correction(2, Family.SECOND, 0.5, z_cut=50.0, num_points=2001)
    bad = solve_correction(2, Family.SECOND, 12.0 / 5.0, z_cut=50.0, num_points=2001)
    assert abs(bad.resonance_amplitude) > 20.0 * abs(ok.resonance_amplitude)


def test_correction_grid_refinement_consistency():
    # doubling the resolution at fixed window leaves the sampled solution
    # essentially unchanged (the correction is uniquely determined)
    coarse = solve_correction(2, Family.SECOND, 0.5, z_cut=40.0, num_points=1001)
    fine = solve_correction(2, Family.SECOND, 0.5, z_cut=40.0, num_points=2001)
    scale = np.max(np.abs(fine.phi))
    assert np.max(np.abs(fine.phi[::2] - coarse.phi)) <= 1e-3 * scale


def test_correction_residual_shrinks_with_window():
    # the interior defect is the truncated-tail part of the solvability
    # integral, so widening the window is what reduces it
    res = [
        solve_correction(2, Family.SECOND, 0.5, z_cut=Z, num_points=N).interior_residual_max
        for Z, N in ((40.0, 1001), (80.0, 2001), (160.0, 4001))
    ]
    assert res[1] <= 0.75 * res[0]
    assert res[2] <= 0.75 * res[1]


def test_expansion_second_difference_is_second_order():
    # smooth first-order structure of the shot profile along the branch:
    # the second difference in n of the normalized profiles is O(n^2)
    from cracktip import build_quartic, real_roots, shoot

    def profile(n):
        roots = [r for r in real_roots(build_quartic(2, n)) if -4.0 < r < -1.5]
        lam = max(roots)
        sol = shoot(2, n, lam, z_max=6.0, rtol=1e-12, atol=1e-13)
        zs = np.linspace(-5.0, 5.0, 81)
        return np.interp(zs, sol.z, sol.psi)

    h = 2e-3
    d2 = profile(2 * h) - 2.0 * profile(h) + profile(0.0)
    d2_half = profile(h) - 2.0 * profile(0.5 * h) + profile(0.0)
    ratio = np.max(np.abs(d2)) / np.max(np.abs(d2_half))
    assert ratio == pytest.approx(4.0, abs=0.6)


@pytest.mark.xfail(
    strict=True,
    reason="the shipped first-order source term does not reproduce the "
    "n-derivative of the shot profile (its mu-coefficient carries z psi' "
    "where the true linearization needs 2 z psi'), so the expansion "
    "psi + n phi is first-order accurate only in the documented variant",
)
def test_correction_first_order_validation_literal():
    from cracktip import build_quartic, real_roots, shoot

    pair = build_eigenfunction(2, Family.FIRST)
    mu = mu_via_ift(2, Family.FIRST)
    corr = solve_correction(2, Family.FIRST, mu, z_cut=50.0, num_points=4001)

    def err(n):
        roots = [r for r in real_roots(build_quartic(2, n)) if -4.0 < r < -1.5]
        sol = shoot(2, n, max(roots), z_max=6.0, rtol=1e-12, atol=1e-13)
        zs = np.linspace(0.0, 5.0, 51)
        shot = np.interp(zs, sol.z, sol.psi)
        expansion = pair.poly(zs) + n * np.interp(zs, corr.z, corr.phi)
        expansion0 = pair.poly(0.0) + n * np.interp(0.0, corr.z, corr.phi)
        return np.max(np.abs(shot - expansion / expansion0))

    ratio = err(1e-3) / err(5e-4)
    assert ratio == pytest.approx(4.0, abs=0.5)
