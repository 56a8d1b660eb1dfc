import math

import numpy as np
import pytest
from scipy.linalg import expm

from fracsplit.grid import GridFunction, GridSpec, inner_product, norm_l2, sample
from fracsplit.laplacian import ConvergenceError, ShiftedSolveConfig, assemble_A
from fracsplit.rational import RationalCoefficients, simpson_coeffs
from fracsplit.spectral import eigenbasis, evolve_exact, evolve_rational
from fracsplit.splitting import (MassOperator, SchemeConfig, build_D_terms, default_levels,
                                 evolve, regularized_step, split_step_componentwise,
                                 split_step_mass)

SINGLE = RationalCoefficients(0.5, [4.0], [4.0])


def u0_model(x1, x2):
    return 100 * x1**2 * (1 - x1) * x2**2 * (1 - x2)


def random_mass(g, rng, lo=1.0, hi=3.0):
    return MassOperator(GridFunction(g, rng.uniform(lo, hi, g.shape)))


def dense_D(coeffs, g):
    A = assemble_A(g)
    eye = np.eye(g.size)
    return sum(a * np.linalg.solve(b * eye + A, A) for a, b in coeffs.terms)


# single interior node: A = 16, D = 4 * 16 / 20 = 3.2

def test_componentwise_single_node():
    g = GridSpec(2, 2)
    w = GridFunction.constant(g, 1.0)
    out = split_step_componentwise(w, SINGLE, 1.0, 0.1)
    assert out.values.item() == pytest.approx(20 / 26.4, rel=1e-13)
    assert out.values.item() == pytest.approx(1 / (1 + 0.1 * 3.2), rel=1e-13)
    out = split_step_componentwise(w, SINGLE, 0.5, 0.1)
    assert out.values.item() == pytest.approx(16.8 / 23.2, rel=1e-13)
    assert abs(out.values.item()) <= 1
    assert np.array_equal(split_step_componentwise(w, SINGLE, 1.0, 0.0).values, w.values)


def test_mass_single_node():
    g = GridSpec(2, 2)
    w = GridFunction.constant(g, 1.0)
    B = MassOperator(GridFunction.constant(g, 2.0))
    assert B.gamma == 2.0
    out = split_step_mass(w, SINGLE, B, 1.0, 0.1)
    assert out.values.item() == pytest.approx(40 / 46.4, rel=1e-13)


def test_regularized_single_node():
    g = GridSpec(2, 2)
    w = GridFunction.constant(g, 1.0)
    out = regularized_step(w, SINGLE, MassOperator.identity(g), 0.5, 0.1)
    assert out.values.item() == pytest.approx(1 - 0.1 * 64 / 23.2, rel=1e-13)
    assert np.array_equal(regularized_step(w, SINGLE, MassOperator.identity(g), 0.5, 0.0).values,
                          w.values)


def test_D_single_node():
    g = GridSpec(2, 2)
    (D,) = build_D_terms(SINGLE)
    assert D(GridFunction.constant(g, 1.0)).values.item() == pytest.approx(3.2, rel=1e-13)


@pytest.mark.parametrize("sigma", [0.0, 0.5, 1.0])
def test_substep_eigen_identity(sigma):
    g = GridSpec(8, 8)
    basis = eigenbasis(g)
    coeffs = simpson_coeffs(0.5, 4)
    tau = 0.05
    for k1, k2 in [(1, 1), (3, 5), (7, 7)]:
        v = basis.mode(k1, k2)
        lam = basis.eigenvalue(k1, k2)
        factor = 1.0
        for a, b in coeffs.terms:
            factor *= (b + (1 - a * (1 - sigma) * tau) * lam) / (b + (1 + a * sigma * tau) * lam)
        out = split_step_componentwise(v, coeffs, sigma, tau)
        assert np.allclose(out.values, factor * v.values, atol=1e-11 * max(1, abs(factor)))


def test_mass_step_matches_dense_system():
    rng = np.random.default_rng(5)
    g = GridSpec(6, 5)
    B = random_mass(g, rng)
    coeffs = simpson_coeffs(0.4, 6)
    w = GridFunction(g, rng.standard_normal(g.shape))
    sigma, tau = 0.7, 0.03
    A = assemble_A(g)
    Bd = np.diag(B.diagonal.values.ravel())
    eye = np.eye(g.size)
    x = w.values.ravel()
    for a, b in coeffs.terms:
        lhs = (b * eye + A) @ Bd + a * sigma * tau * A
        rhs = ((b * eye + A) @ Bd - a * (1 - sigma) * tau * A) @ x
        x = np.linalg.solve(lhs, rhs)
    out = split_step_mass(w, coeffs, B, sigma, tau)
    assert np.allclose(out.values.ravel(), x, rtol=1e-9, atol=1e-11)


def test_regularized_step_matches_dense():
    rng = np.random.default_rng(6)
    g = GridSpec(5, 6)
    B = random_mass(g, rng)
    coeffs = simpson_coeffs(0.6, 4)
    w = GridFunction(g, rng.standard_normal(g.shape))
    sigma, tau = 0.8, 0.2
    A = assemble_A(g)
    eye = np.eye(g.size)
    x = w.values.ravel()
    for a, b in coeffs.terms:
        R = a * np.linalg.solve(b * eye + A + sigma * tau * a * A, A)
        x = x - tau * (R @ x) / B.diagonal.values.ravel()
    out = regularized_step(w, coeffs, B, sigma, tau)
    assert np.allclose(out.values.ravel(), x, rtol=1e-9, atol=1e-11)


def test_mass_identity_reduces_to_componentwise():
    rng = np.random.default_rng(8)
    g = GridSpec(10, 10)
    coeffs = simpson_coeffs(0.5, 10)
    w = GridFunction(g, rng.standard_normal(g.shape))
    a = split_step_componentwise(w, coeffs, 0.6, 0.02)
    b = split_step_mass(w, coeffs, MassOperator.identity(g), 0.6, 0.02)
    assert norm_l2(a - b) <= 1e-10 * norm_l2(a)


@pytest.mark.parametrize("sigma", [0.5, 0.75, 1.0])
def test_mass_step_b_norm_decreases(sigma):
    rng = np.random.default_rng(9)
    g = GridSpec(8, 8)
    coeffs = simpson_coeffs(0.5, 10)
    for _ in range(20):
        B = random_mass(g, rng)
        w = GridFunction(g, rng.standard_normal(g.shape))
        out = split_step_mass(w, coeffs, B, sigma, 0.5)
        assert B.norm(out) <= B.norm(w) * (1 + 1e-12)


def test_regularized_boundary_case_b_norm():
    rng = np.random.default_rng(10)
    g = GridSpec(8, 8)
    B = MassOperator.identity(g)
    coeffs = simpson_coeffs(0.5, 10)
    for _ in range(100):
        w = GridFunction(g, rng.standard_normal(g.shape))
        out = regularized_step(w, coeffs, B, 0.5, float(rng.choice([0.01, 1.0, 100.0])))
        assert B.norm(out) <= B.norm(w) * (1 + 1e-12)


def test_regularized_can_grow_without_condition():
    # far outside 2 gamma sigma >= 1 the explicit character shows
    g = GridSpec(8, 8)
    B = MassOperator(GridFunction.constant(g, 0.01))
    w = eigenbasis(g).mode(7, 7)
    out = regularized_step(w, RationalCoefficients(0.5, [50.0], [1.0]), B, 0.01, 1.0)
    assert B.norm(out) > B.norm(w)


def test_D_terms_commute_and_self_adjoint():
    rng = np.random.default_rng(12)
    g = GridSpec(8, 8)
    D = build_D_terms(simpson_coeffs(0.5, 8))
    for _ in range(10):
        i, j = rng.choice(len(D), 2, replace=False)
        v = GridFunction(g, rng.standard_normal(g.shape))
        w = GridFunction(g, rng.standard_normal(g.shape))
        dij, dji = D[i](D[j](v)), D[j](D[i](v))
        assert norm_l2(dij - dji) <= 1e-9 * norm_l2(dij)
        lhs, rhs = inner_product(D[i](v), w), inner_product(v, D[i](w))
        assert abs(lhs - rhs) <= 1e-9 * max(abs(lhs), norm_l2(D[i](v)) * norm_l2(w))
        assert inner_product(D[i](v), v) > 0


def test_D_terms_sum_to_operator():
    rng = np.random.default_rng(13)
    g = GridSpec(6, 6)
    coeffs = simpson_coeffs(0.3, 6)
    v = GridFunction(g, rng.standard_normal(g.shape))
    total = sum((D(v) for D in build_D_terms(coeffs)), GridFunction.zeros(g))
    assert np.allclose(total.values.ravel(), dense_D(coeffs, g) @ v.values.ravel(), rtol=1e-9)


def test_scheme_config():
    assert SchemeConfig(sigma=0.5).stability_guaranteed()
    assert not SchemeConfig(sigma=0.4).stability_guaranteed()
    assert SchemeConfig(kind="mass_weighted", sigma=0.5).stability_guaranteed()
    reg = SchemeConfig(kind="regularized", sigma=0.25)
    assert reg.stability_guaranteed(gamma=2.0) and not reg.stability_guaranteed(gamma=1.0)
    assert SchemeConfig(tau=0.01, n_steps=10).final_time == pytest.approx(0.1)
    for bad in [dict(kind="vector"), dict(ordering="reverse"), dict(sigma=-1),
                dict(tau=0.0), dict(n_steps=-1)]:
        with pytest.raises(ValueError):
            SchemeConfig(**bad)


def test_evolve_zero_steps():
    g = GridSpec(6, 6)
    u0 = sample(g, u0_model)
    traj = evolve(SchemeConfig(n_steps=0), simpson_coeffs(0.5, 4), u0)
    assert traj.recorded_steps == [0] and len(traj.snapshots) == 1
    assert np.array_equal(traj.final.values, u0.values)


def test_evolve_pairing_errors():
    g = GridSpec(4, 4)
    u0 = sample(g, u0_model)
    c = simpson_coeffs(0.5, 4)
    with pytest.raises(ValueError):
        evolve(SchemeConfig(), c, u0, B=MassOperator.identity(g))
    with pytest.raises(ValueError):
        evolve(SchemeConfig(kind="mass_weighted"), c, u0)


def test_evolve_error_location():
    g = GridSpec(32, 32)
    u0 = sample(g, u0_model)
    cfg = ShiftedSolveConfig(rel_tolerance=1e-12, max_iterations=2)
    with pytest.raises(ConvergenceError) as info:
        evolve(SchemeConfig(tau=0.01, n_steps=3), simpson_coeffs(0.5, 6), u0, cfg=cfg)
    assert info.value.level == 1 and info.value.term is not None


def test_default_levels():
    assert default_levels(0) == [0]
    assert default_levels(10) == list(range(11))
    assert default_levels(40)[-1] == 40 and len(default_levels(40)) == 11
    assert default_levels(3) == [0, 1, 2, 3]


def test_trajectory_records_and_csv(tmp_path):
    g = GridSpec(8, 8)
    u0 = sample(g, u0_model)
    alpha = 0.5
    coeffs = simpson_coeffs(1 - alpha, 10)
    scheme = SchemeConfig(sigma=1.0, tau=0.01, n_steps=20)
    traj = evolve(scheme, coeffs, u0, oracle=lambda u, t: evolve_exact(u, t, alpha))
    assert traj.recorded_steps == default_levels(20)
    assert len(traj.eps2) == len(traj.recorded_steps) == len(traj.snapshots)
    assert traj.eps2[0] <= 1e-14
    assert np.all(np.diff(traj.l2_norms) <= 1e-14)
    path = tmp_path / "traj.csv"
    traj.write_csv(path)
    rows = path.read_text().splitlines()
    assert rows[0] == "step,t,l2_norm,eps2,epsinf"
    assert len(rows) == len(traj.recorded_steps) + 1
    last = rows[-1].split(",")
    assert int(last[0]) == 20 and float(last[1]) == pytest.approx(0.2)


@pytest.mark.parametrize("sigma", [0.5, 1.0])
@pytest.mark.parametrize("alpha", [0.25, 0.75])
def test_componentwise_norm_never_grows(sigma, alpha):
    g = GridSpec(8, 8)
    u0 = sample(g, u0_model)
    coeffs = simpson_coeffs(1 - alpha, 20)
    for tau in [1e-3, 1e-1, 10.0]:
        traj = evolve(SchemeConfig(sigma=sigma, tau=tau, n_steps=5), coeffs, u0)
        assert np.all(np.diff(traj.l2_norms) <= 1e-14 * traj.l2_norms[0])


def _final_error(u0, coeffs, scheme, ref, B=None):
    traj = evolve(scheme, coeffs, u0, B=B, levels=[scheme.n_steps])
    return norm_l2(traj.final - ref)


@pytest.mark.parametrize("ordering", ["forward", "symmetrized"])
def test_converges_to_rational_evolution(ordering):
    # the split system is exact, so with a fixed R_m the only error is in time
    g = GridSpec(16, 16)
    u0 = sample(g, u0_model)
    coeffs = simpson_coeffs(0.5, 20)
    T = 0.1
    ref = evolve_rational(u0, T, coeffs)
    for sigma, order in [(1.0, 1.0), (0.5, 2.0)]:
        errs = [_final_error(u0, coeffs, SchemeConfig(sigma=sigma, tau=T / n, n_steps=n,
                                                      ordering=ordering), ref)
                for n in (8, 16, 32)]
        p = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
        assert np.all(np.abs(p - order) < 0.15), (sigma, errs, p)


def test_mass_scheme_orders():
    # non-commuting B: forward sweep is first order even for sigma = 0.5,
    # the symmetrized sweep recovers second order
    rng = np.random.default_rng(21)
    g = GridSpec(8, 8)
    B = random_mass(g, rng)
    coeffs = simpson_coeffs(0.5, 6)
    u0 = sample(g, u0_model)
    T = 0.2
    M = np.linalg.solve(np.diag(B.diagonal.values.ravel()), dense_D(coeffs, g))
    ref = GridFunction(g, expm(-T * M) @ u0.values.ravel())

    def orders(ordering):
        e = np.array([_final_error(u0, coeffs, SchemeConfig("mass_weighted", 0.5, T / n, n,
                                                            ordering), ref, B)
                      for n in (16, 32, 64)])
        return np.log2(e[:-1] / e[1:])

    p_fwd, p_sym = orders("forward"), orders("symmetrized")
    assert np.all(np.abs(p_fwd - 1) < 0.2), p_fwd
    assert np.all(np.abs(p_sym - 2) < 0.2), p_sym


def test_regularized_first_order():
    rng = np.random.default_rng(22)
    g = GridSpec(8, 8)
    B = random_mass(g, rng)
    coeffs = simpson_coeffs(0.5, 6)
    u0 = sample(g, u0_model)
    T = 0.2
    M = np.linalg.solve(np.diag(B.diagonal.values.ravel()), dense_D(coeffs, g))
    ref = GridFunction(g, expm(-T * M) @ u0.values.ravel())
    e = [_final_error(u0, coeffs, SchemeConfig("regularized", 0.5, T / n, n), ref, B)
         for n in (16, 32, 64)]
    p = np.log2(np.array(e[:-1]) / np.array(e[1:]))
    assert np.all(np.abs(p - 1) < 0.2), p


def test_mass_operator_validation():
    g = GridSpec(4, 4)
    with pytest.raises(ValueError):
        MassOperator(GridFunction.constant(g, 0.0))
    with pytest.raises(ValueError):
        MassOperator(GridFunction.constant(g, 1.0), gamma=2.0)
    B = MassOperator(GridFunction.constant(g, 4.0), gamma=1.0)
    u = GridFunction.constant(g, 1.0)
    assert B.norm(u) == pytest.approx(2 * norm_l2(u))
    assert math.isclose(B.solve(B.apply(u)).values[0, 0], 1.0)
