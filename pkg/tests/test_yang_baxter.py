import numpy as np
import pytest
import sympy as sp

from qch.linalg import rank
from qch.scalar_ring import RingConfig
from qch.tensor_ops import LegOperator, partial_trace
from qch.yang_baxter import (
    YBError,
    antisym_image,
    braid_residual,
    build_flip,
    build_standard_R,
    check_compatible,
    compatible_pair,
    contractor_K,
    g_matrix,
    minimal_poly_residual,
    rho_weights,
    skew_inverse,
    sym_image,
    twist,
)

from conftest import EXACT, yb

KS = [2, 3, 4, 5]


def test_rho_weights():
    assert rho_weights(2) == [0, 0]
    assert rho_weights(3) == [1, 0, -1]
    assert rho_weights(5) == [3, 1, 0, -1, -3]


def test_k2_eigenvalues_by_independent_diagonalization():
    # sympy over Q(q) at q = 7/5, independent of the package's linear algebra
    R = sp.Matrix(yb(2).R.data.tolist()).applyfunc(lambda v: sp.Rational(int(v.numerator), int(v.denominator)))
    q = sp.Rational(7, 5)
    ev = R.eigenvals()
    assert ev == {q: 2, 1 / q: 1, -1 / q: 1}


@pytest.mark.parametrize("k", KS)
def test_braid_and_minimal_polynomial(k):
    d = yb(k)
    assert braid_residual(d.R, EXACT).ok
    assert minimal_poly_residual(d.R, EXACT, d.mu).ok


@pytest.mark.parametrize("k", [2, 3])
def test_eigenvalues_within_expected_set(k):
    R = yb(k, "float").R.data
    q = 1.4
    allowed = np.array([q, -1 / q, q ** (1 - k)])
    for lam in np.linalg.eigvals(R):
        assert np.min(np.abs(allowed - lam)) < 1e-8


def test_flip_properties():
    P = build_flip(3, EXACT)
    assert np.array_equal(P.data @ P.data, EXACT.eye(9))
    D, strict = skew_inverse(P, EXACT)
    assert strict and np.array_equal(D.data, EXACT.eye(3))
    assert braid_residual(P, EXACT).ok


def test_scaled_flip_skew_inverse():
    P = build_flip(2, EXACT)
    D, _ = skew_inverse(P.like(P.data * 3), EXACT)
    assert np.array_equal(D.data, EXACT.eye(2) / 3)


@pytest.mark.parametrize("k", KS)
def test_skew_inverse_of_R_is_diagonal_power_of_q(k):
    # frozen closed form: D = μ diag(q^{-2ρ_i})
    d = yb(k)
    q = EXACT.qe
    want = EXACT.zeros((k, k))
    for i, r in enumerate(rho_weights(k)):
        want[i, i] = d.mu * q ** (-r)
    assert np.array_equal(d.D.data, want)
    assert d.strict


@pytest.mark.parametrize("k", [2, 3])
def test_skew_inverse_defining_equation(k):
    d = yb(k)
    N = k
    f4 = d.R.data.reshape(N, N, N, N)
    tr = np.einsum("iajb,ba->ij", f4, d.D.data)
    assert np.array_equal(tr, EXACT.eye(N))


@pytest.mark.parametrize("k", [2, 3, 4])
def test_idempotents(k):
    d = yb(k)
    A, S, C = d.A2, d.S2, d.C2
    I = EXACT.eye(A.shape[0])
    zero = EXACT.zeros(A.shape)
    assert np.array_equal(A + S + C, I)
    for X, Y in ((A, S), (S, C), (A, C)):
        assert np.array_equal(X @ Y, zero)
    assert rank(d.K.data, EXACT) == 1


def test_contractor_rejects_mu_equal_q():
    with pytest.raises(YBError):
        contractor_K(yb(2).R, EXACT, EXACT.qe)


@pytest.mark.parametrize("k", KS)
def test_antisymmetrizer_dimensions(k):
    dims = [p.dim for p in yb(k).antisym(k + 1)[1:]]
    assert dims[k - 1] == 1 and dims[k] == 0
    assert all(x > 0 for x in dims[:k])


def test_a2_matches_explicit_formula():
    d = yb(2)
    p, dim = antisym_image(d.R, EXACT, 2)
    assert np.array_equal(p.dense(), d.A2)
    s, _ = sym_image(d.R, EXACT, 2)
    assert np.array_equal(s.dense(), d.S2)


@pytest.mark.parametrize("k", [2, 3])
def test_projectors_commute_with_R(k):
    d = yb(k)
    from qch.tensor_ops import embed

    q = EXACT.qe
    for n in (2, 3):
        A = d.antisym(3)[n].dense()
        S = d.sym(3)[n].dense()
        for i in range(1, n):
            Ri = embed(d.R, i, n).data
            assert np.array_equal(Ri @ A, A @ Ri)
            assert np.array_equal(Ri @ A, -A / q)
            assert np.array_equal(Ri @ S, q * S)
        assert np.array_equal(A @ A, A)


@pytest.mark.parametrize("k", [2, 3, 4])
def test_twist_relations(k):
    d = yb(k)
    for F in (d.flip(), d.R):
        assert all(r.ok for r in check_compatible(d.R, F, EXACT))
    assert np.array_equal(twist(d.R, d.R, EXACT).data, d.R.data)
    P = d.flip()
    assert np.array_equal(twist(d.R, P, EXACT).data, P.data @ d.R.data @ P.data)


@pytest.mark.parametrize("k", [2, 3])
@pytest.mark.parametrize("F", ["P", "R"])
def test_g_matrix_is_identity(k, F):
    pair = compatible_pair(yb(k), F)
    assert np.array_equal(pair.G, EXACT.eye(k))
    assert np.array_equal(pair.G @ pair.Ginv, EXACT.eye(k))


def test_restricted_q_rejected():
    with pytest.raises(YBError, match="parameter restriction"):
        build_standard_R(3, RingConfig.rational("1"))


def test_laurent_ring_builds_braid_form_R():
    R = build_standard_R(2, RingConfig.laurent())
    assert braid_residual(R, RingConfig.laurent()).ok
