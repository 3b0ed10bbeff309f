import numpy as np
import pytest

from qch.char_subalg import CharError
from qch.ch_identities import (
    DescendantTable,
    ch_degree,
    ch_even_minus,
    ch_even_plus,
    ch_odd,
    epsilon_even,
    epsilon_odd,
    make_context,
    run_chain,
    uv_residual,
    xrek_residual,
)

from conftest import REFLECTION, TORUS, point


def _all_pass(rep):
    bad = [(e.identity, e.status, e.residual, e.detail) for e in rep.entries if e.status not in ("pass", "skip")]
    assert not bad, bad


@pytest.mark.parametrize("k", [2, 3])
@pytest.mark.parametrize("spec", ["torus", "operator-P", "operator-R"])
def test_chain_exact(k, spec):
    s = TORUS[k] if spec == "torus" else {"kind": "operator", "F": spec[-1]}
    ev, cd = point(k, s)
    rep = run_chain(ev, cd)
    _all_pass(rep)
    names = {e.identity for e in rep.entries if e.status == "pass"}
    assert ("CH-O-odd" if k % 2 else "CH-O+") in names


def test_chain_k4_torus():
    ev, cd = point(4, TORUS[4])
    rep = run_chain(ev, cd)
    _all_pass(rep)
    assert rep.get("CH-O+").status == "pass"
    assert rep.get("CH-O-1").status == "skip"


@pytest.mark.parametrize("k", [2, 4])
def test_negative_component(k):
    ev, cd = point(k, REFLECTION[k])
    ctx = make_context(ev, cd)
    assert ch_even_minus(ctx).ok
    with pytest.raises(CharError):
        ch_even_plus(ctx)
    if k == 2:
        _all_pass(run_chain(ev, cd))


def test_k5_float_cayley_hamilton():
    ev, cd = point(5, TORUS[5], "float")
    r = ch_odd(make_context(ev, cd))
    assert r.value < 1e-9


def test_ch_applicability_by_parity():
    ev, cd = point(2, TORUS[2])
    with pytest.raises(CharError):
        ch_odd(make_context(ev, cd))


@pytest.mark.parametrize("k", [2, 3])
def test_printed_sign_of_V_fails(k):
    ev, cd = point(k, TORUS[k])
    ctx = make_context(ev, cd)
    assert all(uv_residual(ctx, i).ok for i in range(1, k + 2))
    assert not all(uv_residual(ctx, i, printed=True).ok for i in range(1, k + 2))


def test_recursion_power_of_g():
    ev, cd = point(2, TORUS[2])
    tab = DescendantTable(make_context(ev, cd))
    assert all(xrek_residual(tab, 0, i, g_right=1).ok for i in range(1, 4))
    assert not all(xrek_residual(tab, 0, i, g_right=2).ok for i in range(1, 4))


@pytest.mark.parametrize("k,spec", [(2, TORUS[2]), (3, TORUS[3]), (4, TORUS[4]), (2, REFLECTION[2])])
def test_ch_degree(k, spec):
    ev, cd = point(k, spec)
    assert ch_degree(make_context(ev, cd)) == k


def test_epsilon_examples():
    ev, cd = point(3, TORUS[3])
    ctx = make_context(ev, cd)
    eps = epsilon_odd(ctx)
    assert len(eps) == 3
    assert np.array_equal(eps[1], cd.e[1] - cd.g_half)
    assert np.array_equal(eps[2], cd.g)
    ev, cd = point(4, TORUS[4])
    eps = epsilon_even(make_context(ev, cd))
    assert np.array_equal(eps[1], cd.e[1])
    assert np.array_equal(eps[2], cd.g)


def test_epsilon_even_k6_middle():
    ev, cd = point(6, {"kind": "identity", "F": "P", "c": 2}, "float")
    eps = epsilon_even(make_context(ev, cd))
    np.testing.assert_allclose(eps[2], cd.e[2] + cd.g)
    np.testing.assert_allclose(eps[4], eps[0] @ cd.g @ cd.g)
