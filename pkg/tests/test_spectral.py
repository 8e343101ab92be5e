import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from maxharm import (
    DomainError,
    Grid,
    ParameterError,
    ScalarField,
    VectorField,
    commutator_crw,
    commutator_power,
    commutator_rw,
    czo_apply,
    hodge_decompose,
    lq_norm,
    riesz2_apply,
    t_apply,
)
from maxharm.lab.corpus import gen_corpus
from maxharm.spectral import (
    CommutatorReport,
    get_operator,
    power_field,
    rw_field,
    spectral_gradient,
    wavevectors,
)

W = 2 * np.pi


@pytest.fixture(scope="module")
def T():
    return Grid.unit_torus(64)


def _rel(a, b):
    return np.linalg.norm(a - b) / np.linalg.norm(b)


def _grad_sin(T):
    x, y = T.mesh()
    phi = np.sin(W * x) * np.sin(W * y)
    grad = np.stack([W * np.cos(W * x) * np.sin(W * y), W * np.sin(W * x) * np.cos(W * y)], -1)
    return phi, VectorField(T, grad)


def _solenoidal(T):
    x, y = T.mesh()
    # perpendicular gradient of the stream function cos(2 pi x) sin(4 pi y)
    psi_x = -W * np.sin(W * x) * np.sin(2 * W * y)
    psi_y = 2 * W * np.cos(W * x) * np.cos(2 * W * y)
    return VectorField(T, np.stack([-psi_y, psi_x], -1))


def test_gradients_fixed_by_r2_and_killed_by_t(T):
    _, g = _grad_sin(T)
    assert _rel(riesz2_apply(g).values, g.values) < 1e-10
    assert np.linalg.norm(t_apply(g).values) / np.linalg.norm(g.values) < 1e-10


def test_solenoidal_killed_by_r2_and_fixed_by_t(T):
    v = _solenoidal(T)
    assert np.linalg.norm(riesz2_apply(v).values) / np.linalg.norm(v.values) < 1e-10
    assert _rel(t_apply(v).values, v.values) < 1e-10


def test_single_mode_orthogonal_component(T):
    x, _ = T.mesh()
    v = np.stack([np.zeros_like(x), np.cos(W * x)], -1)
    assert np.abs(riesz2_apply(VectorField(T, v)).values).max() < 1e-12


def test_r2_plus_t_is_identity(T, rng):
    F = VectorField(T, rng.standard_normal((64, 64, 2)))
    np.testing.assert_allclose(riesz2_apply(F).values + t_apply(F).values, F.values, atol=1e-12)


def test_projections_idempotent_and_orthogonal(T, rng):
    F = VectorField(T, rng.standard_normal((64, 64, 2)))
    R, Tf = riesz2_apply(F), t_apply(F)
    assert _rel(riesz2_apply(R).values, R.values) < 1e-10
    assert _rel(t_apply(Tf).values, Tf.values) < 1e-10
    assert np.linalg.norm(riesz2_apply(Tf).values) / np.linalg.norm(F.values) < 1e-10


def test_hodge_recovers_potential(T):
    phi, g = _grad_sin(T)
    gphi, h, pot = hodge_decompose(g)
    assert np.abs(pot.values - pot.values.mean() - phi).max() < 1e-10
    assert np.linalg.norm(h.values) / np.linalg.norm(g.values) < 1e-10


@pytest.mark.parametrize("seed", range(5))
def test_hodge_orthogonal_and_pythagorean(T, seed):
    F = VectorField(T, np.random.default_rng(seed).standard_normal((64, 64, 2)))
    gphi, h, _ = hodge_decompose(F)
    f2 = np.sum(F.values**2)
    assert abs(np.sum(gphi.values * h.values)) <= 1e-10 * f2
    assert np.sum(gphi.values**2) + np.sum(h.values**2) == pytest.approx(f2, rel=1e-10)
    assert _rel(spectral_gradient(hodge_decompose(F)[2]).values, gphi.values) < 1e-10


def test_box_domain_rejected(box64):
    with pytest.raises(DomainError):
        riesz2_apply(VectorField(box64, np.zeros((64, 64, 2))))
    with pytest.raises(DomainError):
        czo_apply(ScalarField(box64, np.zeros((64, 64))))


def test_nyquist_is_zeroed():
    g = Grid.unit_torus(8)
    k0, k1 = wavevectors(g)
    assert np.all(k0[4] == 0) and np.all(k1[:, 4] == 0)


# -- scalar operator ---------------------------------------------------------------------


def test_czo_single_mode(T):
    x, y = T.mesh()
    f = ScalarField(T, np.cos(W * (x + y)))
    np.testing.assert_allclose(czo_apply(f).values, 0.5 * f.values, atol=1e-12)


def test_czo_constant_is_zero(T):
    assert np.abs(czo_apply(ScalarField(T, np.full((64, 64), 3.0))).values).max() < 1e-14


def test_czo_contracts_l2(T, rng):
    for _ in range(10):
        f = ScalarField(T, rng.standard_normal((64, 64)))
        assert np.linalg.norm(czo_apply(f).values) <= np.linalg.norm(f.values)


@pytest.mark.parametrize("name,dim", [("riesz12", 2), ("hilbert", 1), ("identity", 2), ("identity", 1)])
def test_operator_symbols_bounded(name, dim):
    op = get_operator(name, dim)
    g = Grid.unit_torus(16, dim=dim)
    sym = op.evaluate(g)
    assert np.abs(sym).max() <= 1.0 + 1e-15
    if name != "identity":
        assert sym.flat[0] == 0


def test_operator_lookup_errors(T):
    with pytest.raises(ParameterError):
        get_operator("nonsense", 2)
    with pytest.raises(ParameterError):
        get_operator("riesz12", 1)
    with pytest.raises(ParameterError):
        czo_apply(ScalarField(T, np.ones((64, 64))), get_operator("grad_projection", 2))


def test_hilbert_on_cosine():
    g = Grid.unit_torus(64, dim=1)
    (x,) = g.mesh()
    out = czo_apply(ScalarField(g, np.cos(W * x)), get_operator("hilbert", 1)).values
    np.testing.assert_allclose(out, np.sin(W * x), atol=1e-12)


@given(
    a=arrays(np.float64, (16, 16), elements=st.floats(-5, 5)),
    b=arrays(np.float64, (16, 16), elements=st.floats(-5, 5)),
    c=st.floats(-3, 3),
    sx=st.integers(0, 15),
    sy=st.integers(0, 15),
)
def test_czo_linear_and_translation_invariant(a, b, c, sx, sy):
    g = Grid.unit_torus(16)
    Ta, Tb = czo_apply(ScalarField(g, a)).values, czo_apply(ScalarField(g, b)).values
    lin = czo_apply(ScalarField(g, a + c * b)).values
    np.testing.assert_allclose(lin, Ta + c * Tb, atol=1e-12 * (1 + np.abs(a).max() + np.abs(c * b).max()))
    shifted = czo_apply(ScalarField(g, np.roll(a, (sx, sy), (0, 1)))).values
    np.testing.assert_allclose(shifted, np.roll(Ta, (sx, sy), (0, 1)), atol=1e-12 * (1 + np.abs(a).max()))


# -- commutators --------------------------------------------------------------------------


def _log_lambda(g):
    x, y = g.mesh()
    d = np.hypot(np.minimum(x, 1 - x), np.minimum(y, 1 - y))
    return ScalarField(g, np.log(np.maximum(d, g.h)))


def test_crw_trivial_cases(T, rng):
    f = ScalarField(T, rng.standard_normal((64, 64)))
    assert commutator_crw(ScalarField(T, np.full((64, 64), 2.5)), f).lhs_norm < 1e-13
    r = commutator_crw(_log_lambda(T), f.with_values(np.zeros((64, 64))))
    assert r.lhs_norm == 0.0 and r.degenerate


def test_identity_operator_commutes_exactly(T, rng):
    f = ScalarField(T, rng.standard_normal((64, 64)))
    ident = get_operator("identity", 2)
    assert commutator_crw(_log_lambda(T), f, ident).lhs_norm == 0.0
    assert commutator_rw(f, ident).lhs_norm == 0.0
    assert commutator_power(f, ident, eps=0.3).lhs_norm == 0.0


def test_crw_shift_of_lambda(T, rng):
    f = ScalarField(T, rng.standard_normal((64, 64)))
    lam = _log_lambda(T)
    a = commutator_crw(lam, f).lhs_norm
    b = commutator_crw(lam.with_values(lam.values + 7.0), f).lhs_norm
    assert b == pytest.approx(a, rel=1e-10)


# first-build regression values: corpus maxima at 64^2 (trig corpus, seed 31)
CRW_MAX = 0.36040041196148287
RW_MAX = 0.4603614131232962


def _corpus_maxima(n):
    g = Grid.unit_torus(n)
    lam = _log_lambda(g)
    fs = gen_corpus("trig", g, 31, 5)
    return max(commutator_crw(lam, f).ratio for f in fs), max(commutator_rw(f).ratio for f in fs)


def test_commutator_corpus_regression_and_refinement():
    crw64, rw64 = _corpus_maxima(64)
    assert crw64 == pytest.approx(CRW_MAX, rel=1e-9)
    assert rw64 == pytest.approx(RW_MAX, rel=1e-9)
    crw128, rw128 = _corpus_maxima(128)
    assert max(crw64, crw128) / min(crw64, crw128) <= 1.25
    assert max(rw64, rw128) / min(rw64, rw128) <= 1.25


def test_rw_zero_and_scaling(T):
    f = gen_corpus("trig", T, 3, 1)[0]
    assert commutator_rw(f.with_values(np.zeros((64, 64)))).lhs_norm == 0.0
    base = rw_field(f)
    for c in (0.25, 3.0, 17.0):
        np.testing.assert_allclose(rw_field(f.with_values(c * f.values)), c * base, atol=1e-10 * c * np.abs(base).max())


def test_power_eps_zero_degenerate(T):
    f = gen_corpus("trig", T, 3, 1)[0]
    r = commutator_power(f, eps=0.0)
    assert r.lhs_norm == 0.0 and r.rhs_norm == 0.0 and r.degenerate


@pytest.mark.parametrize("s,eps", [(2, 0.5), (2, 0.7), (1.5, 0.34), (2, -0.1)])
def test_power_eps_range(T, s, eps):
    f = gen_corpus("trig", T, 3, 1)[0]
    with pytest.raises(ParameterError):
        commutator_power(f, s=s, eps=eps)


@pytest.mark.parametrize("s", [1.0, 0.5])
def test_exponent_must_exceed_one(T, s):
    f = gen_corpus("trig", T, 3, 1)[0]
    with pytest.raises(ParameterError):
        commutator_rw(f, s=s)


def test_power_lhopital_link(T):
    x, y = T.mesh()
    f = ScalarField(T, 2 + np.cos(W * x) * np.sin(W * y))
    eps = 0.01
    assert _rel(power_field(f, eps) / eps, rw_field(f)) < 0.05
    assert _rel(power_field(f, eps, sign=-1) / -eps, rw_field(f)) < 0.05


def test_power_eps_sweep_stable(T):
    fs = gen_corpus("trig", T, 5, 3)
    for f in fs:
        base = lq_norm(f.with_values(np.abs(f.values)), 2)
        ratios = [commutator_power(f, eps=e).lhs_norm / (e * base) for e in (0.2, 0.1, 0.05, 0.025)]
        assert max(ratios) / min(ratios) <= 2.0


def test_report_serialises():
    r = CommutatorReport("RW", 2.0, 1.0, 4.0)
    d = r.to_dict()
    assert d["ratio"] == 0.25 and d["kind"] == "RW"
    with pytest.raises(ValueError):
        CommutatorReport("RW", 2.0, -1.0, 4.0)
