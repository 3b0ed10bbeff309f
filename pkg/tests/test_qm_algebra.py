import numpy as np
import pytest

from qch.qm_algebra import (
    BraidWord,
    EvaluationError,
    PowerTable,
    ch_braid,
    contraction_g,
    copies_dense,
    g_permutation_residual,
    identity_point,
    make_evaluation,
    operator_point,
    phi,
    phi_inv,
    power_word,
    qmai_residual,
    star_M,
    star_power_braid,
    star_word,
    tau2_residual,
    torus_point,
    xi_map,
)

from conftest import EXACT, REFLECTION, TORUS, point, yb


def _eq(a, b):
    return np.array_equal(np.asarray(a), np.asarray(b))


def test_braid_word_range_checked():
    with pytest.raises(ValueError):
        BraidWord(2, (2,))
    assert power_word(3).letters == (2, 1)
    assert star_word(power_word(1), power_word(1)).n_strands == 2


@pytest.mark.parametrize("k", [2, 3, 4])
def test_torus_point_is_in_algebra(k):
    ev, _ = point(k, TORUS[k])
    assert ev.residual.ok


def test_torus_point_needs_pairing():
    with pytest.raises(EvaluationError, match="differs"):
        torus_point(yb(3), "P", [2, 4, 7])
    with pytest.raises(EvaluationError):
        torus_point(yb(2), "P", [0, 3])


def test_torus_with_R_twist_rejected_beyond_two():
    assert torus_point(yb(2), "R", ["3/2", 5]).residual.ok
    with pytest.raises(EvaluationError, match="not a point"):
        torus_point(yb(3), "R", [2, 4, 8])


@pytest.mark.parametrize("k", [2, 3])
@pytest.mark.parametrize("F", ["P", "R"])
def test_operator_point(k, F):
    ev = operator_point(yb(k), F)
    assert ev.aux_dim == k and qmai_residual(ev).ok


def test_unknown_kind():
    with pytest.raises(EvaluationError):
        make_evaluation(yb(2), {"kind": "banana"})


@pytest.mark.parametrize("k", [2, 3, 4])
def test_g_at_scaled_identity(k):
    c = EXACT.elt("3")
    ev = identity_point(yb(k), "P", 3)
    g = contraction_g(ev)
    assert g[0, 0] == c * c * yb(k).mu ** 2


@pytest.mark.parametrize("k", [2, 3])
def test_tau2_and_g_permutation(k):
    for spec in (TORUS[k], {"kind": "operator", "F": "P"}, {"kind": "operator", "F": "R"}):
        ev, cd = point(k, spec)
        assert tau2_residual(ev, cd.g).ok
        assert g_permutation_residual(ev, cd.g, cd.g_inv).ok


def test_copies_of_torus_are_diagonal():
    ev, _ = point(2, TORUS[2])
    mats = copies_dense(ev, 2)
    assert len(mats) == 2
    for m in mats:
        assert _eq(m.data, np.diag(np.diag(m.data)))


@pytest.mark.parametrize("k", [2, 3])
def test_first_power_sum_is_trace(k):
    ev, cd = point(k, TORUS[k])
    p1 = ch_braid(ev, BraidWord(1, ()))
    want = sum(ev.M[i, i] * yb(k).D.data[i, i] for i in range(k))
    assert p1[0, 0] == want
    assert _eq(p1, cd.p[1])


@pytest.mark.parametrize("k", [2, 3, 4])
def test_maps_at_identity(k):
    ev = identity_point(yb(k), "P")
    one = EXACT.eye(k)
    assert _eq(phi(ev, one), one)
    assert _eq(xi_map(ev, one), one * yb(k).mu)
    assert _eq(phi_inv(ev, one), one)


@pytest.mark.parametrize("k", [2, 3])
@pytest.mark.parametrize("spec", ["torus", "operator-P", "operator-R"])
def test_phi_inverse_roundtrip(k, spec):
    s = TORUS[k] if spec == "torus" else {"kind": "operator", "F": spec[-1]}
    ev, _ = point(k, s)
    X = ev.M @ ev.M + ev.M
    assert _eq(phi_inv(ev, phi(ev, X)), X)
    assert _eq(phi(ev, phi_inv(ev, X)), X)


@pytest.mark.parametrize("k", [2, 3])
def test_matrix_inverse(k):
    for s in (TORUS[k], {"kind": "operator", "F": "P"}):
        ev, cd = point(k, s)
        Mi = cd.table.m_inverse()
        assert _eq(Mi @ ev.M, EXACT.eye(ev.M.shape[0]))


@pytest.mark.parametrize("k", [2, 3])
@pytest.mark.parametrize("spec", ["torus", "operator-P", "operator-R"])
def test_star_powers_agree_with_braid_route(k, spec):
    s = TORUS[k] if spec == "torus" else {"kind": "operator", "F": spec[-1]}
    ev, cd = point(k, s)
    for n in range(0, 4):
        assert _eq(cd.table[n], star_power_braid(ev, n))


@pytest.mark.parametrize("k", [2, 3])
def test_star_powers_commute_and_add(k):
    ev, cd = point(k, {"kind": "operator", "F": "R"})
    tab = cd.table
    for a in (-1, 1, 2):
        for b in (-2, 1):
            assert _eq(tab.star(a, tab[b]), tab[a + b])
            assert _eq(tab.star(b, tab[a]), tab[a + b])
    assert _eq(star_M(ev, tab[-1]), tab[0])


def test_negative_powers_need_invertible_g():
    ev = identity_point(yb(2), "P", 0)
    with pytest.raises(EvaluationError, match="g is singular"):
        PowerTable(ev)[-1]


def test_reflection_point_in_algebra():
    for k, spec in REFLECTION.items():
        ev, _ = point(k, spec)
        assert ev.residual.ok
    with pytest.raises(EvaluationError, match="even"):
        make_evaluation(yb(3), {"kind": "reflection", "t": [], "a": 2, "c": 3})


def test_float_ring_agrees_with_exact():
    ev_e, cd_e = point(3, TORUS[3])
    ev_f, cd_f = point(3, TORUS[3], "float")
    for n in range(4):
        np.testing.assert_allclose(cd_f.p[n].astype(complex), cd_e.p[n].astype(float), rtol=1e-10)
