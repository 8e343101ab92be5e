import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from maxharm import (
    ConvergenceError,
    DomainError,
    Grid,
    ParameterError,
    PHarmonicProblem,
    ScalarField,
    VectorField,
    check_local_estimates,
    check_rp_bound,
    check_very_weak,
    p_dirichlet_ball,
    riesz2_apply,
    rp_transform,
)
from maxharm.lab.acceptance import oned_oracle
from maxharm.lab.corpus import gen_corpus
from maxharm.pharmonic import ball_energy, ball_stencil, potential, solve_potential, weak_residual
from maxharm.spectral import spectral_gradient

W = 2 * np.pi


@pytest.fixture(scope="module")
def T32():
    return Grid.unit_torus(32)


@pytest.fixture(scope="module")
def load32(T32):
    return gen_corpus("trig", T32, 17, 1, vector=True)[0]


@pytest.fixture(scope="module")
def solved3(load32):
    prob = PHarmonicProblem(3.0, load32)
    u, grad_u, rep = solve_potential(prob)
    return prob, u, grad_u, rep


def _rel(a, b):
    return np.linalg.norm(a - b) / np.linalg.norm(b)


def _grad_phi(g):
    x, y = g.mesh()
    phi = ScalarField(g, np.sin(W * x) * np.cos(2 * W * y) + 0.3 * np.cos(W * y))
    return spectral_gradient(phi)


# -- problem validation ------------------------------------------------------------------


@pytest.mark.parametrize(
    "kw", [dict(p=1.0), dict(p=0.5), dict(p=np.inf), dict(p=3, tol=0.0), dict(p=3, delta=-1.0), dict(p=3, max_iter=0)]
)
def test_problem_rejects_bad_parameters(kw, load32):
    with pytest.raises(ParameterError):
        PHarmonicProblem(load=load32, **kw)


def test_problem_needs_torus(box64):
    with pytest.raises(DomainError):
        PHarmonicProblem(3.0, VectorField(box64, np.zeros((64, 64, 2))))


def test_default_delta(load32):
    prob = PHarmonicProblem(3.0, load32)
    assert prob.reg == pytest.approx(1e-8 * load32.pointwise_norm().mean())


# -- the transform ----------------------------------------------------------------------


def test_p2_is_gradient_projection(load32):
    grad_u, rep = rp_transform(PHarmonicProblem(2.0, load32))
    assert _rel(grad_u.values, riesz2_apply(load32).values) < 1e-6
    assert rep.converged


@pytest.mark.parametrize("p", [2.0, 3.0, 4.0])
def test_gradients_are_fixed(p, T32):
    g = _grad_phi(T32)
    prob = PHarmonicProblem(p, g)
    grad_u, _ = rp_transform(prob)
    assert _rel(grad_u.values, g.values) <= 10 * prob.tol


def test_one_dimensional_oracle():
    g = Grid.unit_torus(129, dim=1)
    (x,) = g.mesh()
    f = np.sin(W * x) + 0.5 * np.cos(2 * W * x) + 0.3
    grad_u, _ = rp_transform(PHarmonicProblem(3.0, VectorField(g, f[:, None]), tol=1e-12))
    assert _rel(grad_u.values[:, 0], oned_oracle(f, 3.0)) < 1e-5


@pytest.mark.parametrize("p", [2.5, 3.0, 4.0])
def test_energy_monotone(p, load32):
    _, rep = rp_transform(PHarmonicProblem(p, load32, init="zero"))
    e = np.array(rep.energy_trace)
    assert np.all(np.diff(e) <= 1e-12 * np.abs(e).max())
    assert rep.iterations >= 1


def test_weak_residual(solved3):
    prob, _, grad_u, rep = solved3
    assert rep.residual <= prob.tol
    assert weak_residual(prob, grad_u) <= prob.tol


@settings(max_examples=5)
@given(c=st.floats(0.2, 5.0))
def test_homogeneity(c, load32, solved3):
    prob, _, grad_u, _ = solved3
    scaled, _ = rp_transform(PHarmonicProblem(3.0, load32.with_values(c * load32.values)))
    assert _rel(scaled.values, c * grad_u.values) < 1e-7


def test_uniqueness_across_initialisations(load32):
    a, _ = rp_transform(PHarmonicProblem(4.0, load32, init="zero"))
    b, _ = rp_transform(PHarmonicProblem(4.0, load32, init="linear"))
    assert _rel(a.values, b.values) <= 10 * 1e-9


def test_zero_load(T32):
    grad_u, rep = rp_transform(PHarmonicProblem(3.0, VectorField(T32, np.zeros((32, 32, 2)))))
    assert not grad_u.values.any() and rep.converged


def test_max_iter_one_raises_with_report(load32):
    with pytest.raises(ConvergenceError) as info:
        rp_transform(PHarmonicProblem(4.0, load32, max_iter=1, init="zero"))
    rep = info.value.report
    assert rep.iterations <= 1 and not rep.converged
    assert rep.to_dict()["converged"] is False


def test_potential_recovers_gradient(solved3):
    _, u, grad_u, _ = solved3
    assert abs(u.values.mean()) < 1e-12
    assert _rel(potential(grad_u).values, u.values) < 1e-12


# -- ball comparison problems -------------------------------------------------------------


def _dense_harmonic_extension(vals, ball, interior):
    """Five-point Laplace equations at interior cells, assembled cell by cell."""
    cells = [tuple(c) for c in np.argwhere(interior)]
    index = {c: i for i, c in enumerate(cells)}
    A = np.zeros((len(cells), len(cells)))
    b = np.zeros(len(cells))
    n0, n1 = vals.shape
    for c, i in index.items():
        A[i, i] = 4.0
        for d in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            nb = ((c[0] + d[0]) % n0, (c[1] + d[1]) % n1)
            if nb in index:
                A[i, index[nb]] -= 1.0
            else:
                b[i] += vals[nb]
    out = vals.copy()
    for c, x in zip(cells, np.linalg.solve(A, b)):
        out[c] = x
    return out


def test_ball_p2_matches_dense_oracle(rng):
    g = Grid.unit_torus(32)
    u = ScalarField(g, rng.standard_normal((32, 32)))
    v, _ = p_dirichlet_ball(u, (16, 16), 8, 2.0, delta=0.0)
    st_ = ball_stencil(u.domain, (16, 16), 8)
    assert np.abs(v.values - _dense_harmonic_extension(u.values, st_.ball, st_.interior)).max() < 1e-8


@pytest.mark.parametrize("p", [2.0, 3.0, 4.0])
def test_ball_affine_is_fixed(p):
    g = Grid.unit_box(40)
    x, y = g.mesh()
    u = ScalarField(g, 0.7 * x - 1.3 * y + 2.0)
    v, _ = p_dirichlet_ball(u, (20, 20), 10, p)
    assert np.abs(v.values - u.values).max() < 1e-9


@pytest.mark.parametrize("p", [2.0, 3.0, 4.0])
def test_ball_energy_decreases(p, rng):
    g = Grid.unit_torus(32)
    u = ScalarField(g, rng.standard_normal((32, 32)))
    v, rep = p_dirichlet_ball(u, (12, 20), 7, p)
    st_ = ball_stencil(u.domain, (12, 20), 7)
    assert ball_energy(v.values, st_, p) <= ball_energy(u.values, st_, p)
    outside = ~st_.interior
    assert np.array_equal(v.values[outside], u.values[outside])
    e = np.array(rep.energy_trace)
    assert np.all(np.diff(e) <= 1e-12 * np.abs(e).max())


def test_ball_must_fit(box64):
    u = ScalarField(box64, np.zeros((64, 64)))
    with pytest.raises(DomainError):
        p_dirichlet_ball(u, (5, 32), 5, 3.0)


# -- estimates ------------------------------------------------------------------------------


def test_local_estimates_tau_one(solved3):
    prob, u, _, _ = solved3
    reps = check_local_estimates(prob, u, (16, 16), 8, 1.0)
    assert [r.name for r in reps] == ["locest", "locest1", "locest2", "locest3"]
    assert (reps[2].lhs, reps[2].rhs) == (reps[0].lhs, reps[0].rhs)


def test_local_estimates_alpha_positive(solved3):
    prob, u, _, rep = solved3
    reps = check_local_estimates(prob, u, (16, 16), 10, 0.5, report=rep)
    assert rep.alpha_estimate > 0
    assert reps[1].params["alpha"] == rep.alpha_estimate
    assert all(r.lhs >= 0 for r in reps)


def test_local_estimates_zero_load_on_ball(T32):
    # load vanishing on B: u is p-harmonic there up to discretisation
    x, y = T32.mesh()
    bump = np.exp(-((x - 0.5) ** 2 + (y - 0.5) ** 2) / 0.004)
    load = VectorField(T32, np.stack([bump, 0.5 * bump], -1))
    prob = PHarmonicProblem(3.0, load)
    u, _, _ = solve_potential(prob)
    r = check_local_estimates(prob, u, (0, 0), 6, 0.5)[0]
    assert r.rhs < 1e-20
    energy = np.mean(np.sum(np.stack(np.gradient(u.values, T32.h), -1) ** 2, -1) ** 1.5)
    assert r.lhs < 1e-4 * energy


def test_local_estimates_tau_range(solved3):
    prob, u, _, _ = solved3
    with pytest.raises(ParameterError):
        check_local_estimates(prob, u, (16, 16), 8, 0.0)


def test_rp_bound_gradient_and_solenoidal(T32):
    g = _grad_phi(T32)
    prob = PHarmonicProblem(3.0, g)
    grad_u, _ = rp_transform(prob)
    for r in check_rp_bound(prob, grad_u):
        assert r.ratio <= 1 + 1e-4
    x, y = T32.mesh()
    sol = VectorField(T32, np.stack([np.sin(W * y), np.cos(W * x)], -1))
    prob2 = PHarmonicProblem(2.0, sol)
    gu, _ = rp_transform(prob2)
    assert max(r.ratio for r in check_rp_bound(prob2, gu)) < 1e-12


def test_rp_bound_rejects_small_s(solved3):
    prob, _, grad_u, _ = solved3
    with pytest.raises(ParameterError):
        check_rp_bound(prob, grad_u, [2.0])


def test_very_weak_eps_zero(solved3):
    prob, _, grad_u, _ = solved3
    reps = check_very_weak(prob, grad_u, (0.0,))
    assert reps[1].lhs == 0.0 and reps[1].rhs == 0.0
    assert reps[2].lhs == 0.0 and reps[2].rhs == 0.0


def test_very_weak_gradient_ratio_one(T32):
    g = _grad_phi(T32)
    prob = PHarmonicProblem(3.0, g)
    grad_u, _ = rp_transform(prob)
    for r in check_very_weak(prob, grad_u):
        if r.name == "very_weak":
            assert r.ratio == pytest.approx(1.0, abs=1e-4)


def test_very_weak_norm_sweep(solved3):
    prob, _, grad_u, _ = solved3
    ratios = [r.ratio for r in check_very_weak(prob, grad_u, (0.05, 0.1, 0.2)) if r.name == "very_weak_hodge_norm"]
    assert max(ratios) / min(ratios) <= 2.0


@pytest.mark.parametrize("eps", [-0.1, 1.0, 2.5])
def test_very_weak_eps_range(eps, solved3):
    prob, _, grad_u, _ = solved3
    with pytest.raises(ParameterError):
        check_very_weak(prob, grad_u, (eps,))
