import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qch.scalar_ring import RingConfig
from qch.tensor_ops import (
    LegOperator,
    apply_local,
    dump_operator,
    embed,
    identity,
    load_operator,
    partial_trace,
    r_trace,
)
from qch.tensor_ops import kernels
from qch.yang_baxter import build_flip

from conftest import EXACT, yb

F64 = RingConfig.floating(1.4)


def _basis(N, idx):
    v = np.zeros(N ** len(idx))
    v[np.ravel_multi_index(idx, (N,) * len(idx))] = 1
    return v


def test_embed_identity_is_identity():
    I2 = identity(2, 3, 1, EXACT)
    assert np.array_equal(embed(I2, 1, 3).data, identity(3, 3, 1, EXACT).data)


def test_embed_flip_swaps_last_two_legs():
    P = build_flip(3, F64)
    P23 = embed(P, 2, 3).data.real
    assert np.array_equal(P23 @ _basis(3, (0, 1, 2)), _basis(3, (0, 2, 1)))


@pytest.mark.parametrize("k", [2, 3])
def test_embedded_braid_relation(k):
    R = yb(k).R
    R1, R2 = embed(R, 1, 3).data, embed(R, 2, 3).data
    assert np.array_equal(R1 @ R2 @ R1, R2 @ R1 @ R2)


def test_embed_position_out_of_range():
    with pytest.raises(IndexError):
        embed(identity(2, 2, 1, EXACT), 3, 3)


def test_partial_trace_of_identity():
    I2 = identity(2, 3, 1, EXACT)
    assert np.array_equal(partial_trace(I2, [1]).data, 3 * EXACT.eye(3))


def test_flip_trace_with_trivial_weight():
    P = build_flip(3, EXACT)
    D = LegOperator(1, 3, 1, EXACT.eye(3))
    assert np.array_equal(r_trace(P, D, [2]).data, EXACT.eye(3))


def test_rank_one_projector_trace():
    v = np.array([1.0, 2.0, 0.0, -1.0])
    P = LegOperator(2, 2, 1, np.outer(v, v) / (v @ v))
    assert np.isclose(partial_trace(P, [1, 2]).data[0, 0], 1.0)


def test_partial_trace_empty_matrix():
    with pytest.raises(ValueError):
        partial_trace(LegOperator(0, 2, 0, np.zeros((0, 0))), [])


def test_r_trace_with_identity_is_partial_trace():
    rng = np.random.default_rng(1)
    X = LegOperator(2, 3, 1, rng.standard_normal((9, 9)) + 0j)
    D = LegOperator(1, 3, 1, np.eye(3, dtype=complex))
    assert np.allclose(r_trace(X, D, [2]).data, partial_trace(X, [2]).data)


def test_r_trace_leg_mismatch():
    X = LegOperator(2, 3, 1, np.eye(9))
    with pytest.raises(ValueError, match="leg mismatch"):
        r_trace(X, LegOperator(1, 2, 1, np.eye(2)), [1])


def test_trace_cyclic_on_traced_leg():
    rng = np.random.default_rng(2)
    A = LegOperator(2, 2, 1, rng.standard_normal((4, 4)))
    X = LegOperator(1, 2, 1, rng.standard_normal((2, 2)))
    IX = embed(X, 2, 2).data
    left = partial_trace(A.like(A.data @ IX), [2]).data
    right = partial_trace(A.like(IX @ A.data), [2]).data
    assert np.allclose(left, right)


def test_embed_is_multiplicative():
    rng = np.random.default_rng(3)
    A = LegOperator(2, 2, 1, rng.standard_normal((4, 4)))
    B = LegOperator(2, 2, 1, rng.standard_normal((4, 4)))
    assert np.allclose(embed(A @ B, 2, 3).data, embed(A, 2, 3).data @ embed(B, 2, 3).data)


def test_aux_leg_is_carried():
    rng = np.random.default_rng(4)
    op = LegOperator(1, 2, 3, rng.standard_normal((6, 6)))
    full = embed(op, 1, 2, 3).data
    # leg 2 untouched: the operator commutes with an embedded leg-2 swap of basis
    X = LegOperator(1, 2, 1, np.array([[0.0, 1.0], [1.0, 0.0]]))
    X2 = embed(X, 2, 2, 3).data
    assert np.allclose(full @ X2, X2 @ full)


@pytest.mark.parametrize("kind", ["exact", "float"])
def test_dump_roundtrip(kind):
    R = yb(2, kind).R
    ring = EXACT if kind == "exact" else F64
    text = dump_operator(R, ring)
    head = text.splitlines()[0]
    assert head == f"legs=2 N=2 aux=1 ring={'rational' if kind == 'exact' else 'float'}"
    back, tag = load_operator(text)
    assert np.array_equal(back.data, R.data)
    assert dump_operator(back, ring) == text


def test_load_rejects_truncated_dump():
    text = dump_operator(yb(2).R, EXACT)
    with pytest.raises(ValueError):
        load_operator("\n".join(text.splitlines()[:-1]))


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 3), st.integers(2, 4), st.integers(1, 2), st.integers(0, 10 ** 6))
def test_numba_and_numpy_kernels_agree(N, n, aux, seed):
    rng = np.random.default_rng(seed)
    j = 2 if n >= 2 else 1
    i = 1 + seed % (n - j + 1)
    op = rng.standard_normal((N ** j * aux,) * 2) + 1j * rng.standard_normal((N ** j * aux,) * 2)
    state = rng.standard_normal((N ** n * aux, 3)) + 0j
    with_aux = aux > 1
    pre, mid, post = N ** (i - 1), N ** j, N ** (n - i - j + 1)
    a = kernels.apply_block(op if with_aux else op[: N ** j, : N ** j], state, pre, mid, post, aux, with_aux, kernel="numpy")
    b = kernels.apply_block(op if with_aux else op[: N ** j, : N ** j], state, pre, mid, post, aux, with_aux, kernel="numba")
    assert np.allclose(a, b)


def test_kernel_env_switch(monkeypatch):
    monkeypatch.setenv("QCH_KERNEL", "numpy")
    assert kernels.backend() == "numpy"
    monkeypatch.setenv("QCH_KERNEL", "cuda")
    with pytest.raises(ValueError):
        kernels.backend()


def test_apply_local_matches_embed():
    rng = np.random.default_rng(5)
    op = LegOperator(2, 3, 1, rng.standard_normal((9, 9)))
    x = rng.standard_normal((27, 4))
    assert np.allclose(apply_local(op, 2, x, 3), embed(op, 2, 3).data @ x)
