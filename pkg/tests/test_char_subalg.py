import itertools
from fractions import Fraction

import numpy as np
import pytest

from qch.char_subalg import (
    CharError,
    char_data,
    classify_component,
    det_q,
    g_half,
    newton_e_residual,
    p0_closed_forms,
    projector_sums,
    reciprocal_residual,
    resolution_residuals,
    wronski_residual,
)
from qch.qm_algebra import identity_point
from qch.yang_baxter import rho_weights

from conftest import EXACT, REFLECTION, TORUS, point, yb

Q = Fraction(7, 5)


def _frac(x):
    return Fraction(int(x.numerator), int(x.denominator))


def _elem_sym(vals, n):
    return sum((np.prod(c) for c in itertools.combinations(vals, n)), Fraction(0))


def identity_nus(k):
    mu = Q ** (1 - k)
    return [Q ** (-r) * mu for r in rho_weights(k)]


@pytest.mark.parametrize("k", [2, 3, 4, 5])
def test_p0_closed_forms_agree(k):
    a, b = p0_closed_forms(k, EXACT)
    assert a == b
    assert sum(_frac(x) for x in identity_nus(k)) == _frac(a)


def test_identity_goldens_k2_k3():
    _, cd = point(2, {"kind": "identity", "F": "P"})
    assert [_frac(x[0, 0]) for x in cd.e[:3]] == [1, Fraction(10, 7), Fraction(25, 49)]
    assert _frac(cd.h[2][0, 0]) == Fraction(50, 49)
    assert _frac(cd.p[0][0, 0]) == _frac(cd.p[1][0, 0]) == Fraction(10, 7)
    _, cd = point(3, {"kind": "identity", "F": "P"})
    assert [_frac(x[0, 0]) for x in cd.e[:4]] == [
        1, Fraction(545, 343), Fraction(13625, 16807), Fraction(15625, 117649)]


@pytest.mark.parametrize("k", [2, 3, 4])
def test_identity_e_are_elementary_symmetric(k):
    _, cd = point(k, {"kind": "identity", "F": "P"})
    nus = identity_nus(k)
    for n in range(k + 1):
        assert _frac(cd.e[n][0, 0]) == _elem_sym(nus, n)


@pytest.mark.parametrize("k", [2, 3, 4])
def test_e1_is_p1_and_top_vanishes(k):
    for spec in (TORUS[k], {"kind": "operator", "F": "P"}) if k < 4 else (TORUS[k],):
        _, cd = point(k, spec)
        assert np.array_equal(cd.e[1], cd.p[1])
        for n in range(k + 1, len(cd.e)):
            assert not cd.e[n].any()


@pytest.mark.parametrize("k", [2, 3])
def test_newton_and_wronski(k):
    _, cd = point(k, {"kind": "operator", "F": "R"})
    for n in range(1, len(cd.e)):
        assert newton_e_residual(cd.e, cd.p, cd.g, k, n, EXACT).ok
    assert all(r.ok for r in wronski_residual(cd.e, cd.h, cd.g, len(cd.h) - 1, EXACT))


@pytest.mark.parametrize("k", [2, 3])
def test_projector_route_matches_newton(k):
    for spec in (TORUS[k], {"kind": "operator", "F": "R"}):
        ev, cd = point(k, spec)
        e, h = projector_sums(ev, k + 1)
        for n in range(k + 2):
            assert np.array_equal(e[n], cd.e[n])
            assert np.array_equal(h[n], cd.h[n])


@pytest.mark.parametrize("k", [2, 3, 4])
def test_reciprocal_relations(k):
    _, cd = point(k, TORUS[k])
    assert all(r.ok for r in reciprocal_residual(cd))
    assert all(r.ok for r in resolution_residuals(cd))


def test_components():
    _, cd = point(2, TORUS[2])
    assert cd.sign == 1
    for k, spec in REFLECTION.items():
        _, cd = point(k, spec)
        assert cd.sign == -1
        assert not cd.e[k // 2].any()
        assert all(r.ok for r in resolution_residuals(cd))
    _, cd = point(3, TORUS[3])
    with pytest.raises(CharError, match="even"):
        classify_component(cd)


def test_g_half_odd_only():
    _, cd = point(3, TORUS[3])
    gh = g_half(cd)
    assert np.array_equal(gh @ gh, cd.g)
    _, cd2 = point(2, TORUS[2])
    with pytest.raises(CharError):
        g_half(cd2)


@pytest.mark.parametrize("k", [2, 3, 4])
def test_quantum_determinant(k):
    ev = identity_point(yb(k), "P")
    cd = char_data(ev)
    assert det_q(cd)[0, 0] == 1
    cd3 = char_data(identity_point(yb(k), "P", 3))
    assert _frac(det_q(cd3)[0, 0]) == 3 ** k


@pytest.mark.parametrize("k", [2, 3])
def test_operator_point_has_central_g(k):
    ev, cd = point(k, {"kind": "operator", "F": "P"})
    S = ev.scalar_matrix(cd.g)
    assert np.array_equal(S @ ev.M, ev.M @ S)
