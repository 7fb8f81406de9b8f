"""
Tests for ncerg weighted block algebras.
"""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ncerg.algebra import (
    AlgebraShape,
    Operator,
    abs_op,
    proj_complement,
    proj_meet,
    random_contraction,
    random_operator,
    random_positive,
    random_projection,
    random_shape,
    random_unitary,
    spectral_decompose,
    spectral_projection,
    spectral_window,
    trace,
)
from ncerg.exceptions import (
    InvalidParameterError,
    InvalidWindowError,
    NotProjectionError,
    NotSelfAdjointError,
    ShapeMismatchError,
)
from ncerg.spaces import norm_p


MIXED = AlgebraShape(((1, 1.0), (2, 0.5)))


def test_shape_properties():
    assert MIXED.total_trace == pytest.approx(2.0)
    assert MIXED.hs_dimension == 5
    assert MIXED.hs_offsets == (0, 1)
    assert MIXED.dims == (1, 2)
    assert not MIXED.is_diagonal
    assert AlgebraShape.diagonal(3).is_diagonal


def test_shape_from_spec_accepts_both_forms():
    assert AlgebraShape.from_spec([[1, 1.0], [2, 0.5]]) == MIXED
    assert AlgebraShape.from_spec({"blocks": [[1, 1.0], [2, 0.5]]}) == MIXED


@pytest.mark.parametrize("blocks", [(), ((0, 1.0),), ((2, -1.0),), ((2, float("inf")),), ((1.5, 1.0),)])
def test_invalid_shapes(blocks):
    with pytest.raises(InvalidParameterError):
        AlgebraShape(blocks)


def test_block_count_mismatch():
    with pytest.raises(ShapeMismatchError):
        Operator(MIXED, [np.eye(1)])


def test_block_size_mismatch():
    with pytest.raises(ShapeMismatchError):
        Operator(MIXED, [np.eye(1), np.eye(3)])


def test_weighted_trace():
    shape = AlgebraShape.diagonal(2, [1.0, 2.0])
    assert trace(Operator.diagonal(shape, [3.0, 4.0])) == pytest.approx(11.0)
    assert trace(Operator.identity(MIXED)) == pytest.approx(MIXED.total_trace)


def test_hs_coordinates_are_isometric():
    """||vec(x)||^2 = tau(x* x) and from_hs_vector inverts to_hs_vector."""
    rng = np.random.default_rng(1)
    x = random_operator(MIXED, rng)
    vec = x.to_hs_vector()
    assert np.vdot(vec, vec).real == pytest.approx(trace(x.adjoint() @ x))
    assert Operator.from_hs_vector(MIXED, vec).allclose(x)


def test_spectral_window_boundaries():
    """(lo, hi]: hi included, lo excluded."""
    x = Operator.diagonal(AlgebraShape.diagonal(3), [1.0, 2.0, 3.0])
    window = spectral_window(x, 1.0, 2.0)
    np.testing.assert_allclose(window.diagonal_values().real, [0.0, 2.0, 0.0], atol=1e-12)
    assert spectral_window(x, 0.0, 3.0).allclose(x)


def test_adjacent_windows_partition_spectrum():
    rng = np.random.default_rng(2)
    x = random_positive(MIXED, rng)
    cut = float(np.median(np.linalg.eigvalsh(x.blocks[1])))
    low = spectral_window(x, -1.0, cut)
    high = spectral_window(x, cut, x.norm_inf + 1.0)
    assert (low + high).allclose(x, atol=1e-9)


def test_spectral_projection():
    x = Operator.diagonal(AlgebraShape.diagonal(3), [1.0, 2.0, 3.0])
    e = spectral_projection(x, 1.5, 3.0)
    assert e.is_projection
    np.testing.assert_allclose(e.diagonal_values().real, [0.0, 1.0, 1.0], atol=1e-12)


def test_empty_window_rejected():
    x = Operator.identity(MIXED)
    with pytest.raises(InvalidWindowError):
        spectral_window(x, 1.0, 1.0)
    with pytest.raises(InvalidWindowError):
        spectral_projection(x, 2.0, 1.0)


def test_degenerate_eigenvalues_merge():
    x = Operator.diagonal(AlgebraShape.diagonal(2), [1.0, 1.0 + 1e-12])
    dec = spectral_decompose(x)
    assert len(dec.eigenvalues) == 1
    assert dec.traces == (2.0,)
    assert dec.reconstruct().allclose(x, atol=1e-10)


def test_spectral_decompose_needs_selfadjoint():
    x = Operator(AlgebraShape.matrix(2), [[[0.0, 1.0], [0.0, 0.0]]])
    with pytest.raises(NotSelfAdjointError):
        spectral_decompose(x)


def test_projection_lattice():
    shape = AlgebraShape.diagonal(3)
    e = Operator.diagonal(shape, [1, 1, 0])
    f = Operator.diagonal(shape, [0, 1, 1])
    assert proj_meet(e, f).allclose(Operator.diagonal(shape, [0, 1, 0]))
    assert proj_complement(e).allclose(Operator.diagonal(shape, [0, 0, 1]))


def test_meet_of_lines_in_general_position_is_zero():
    shape = AlgebraShape.matrix(2)
    e = Operator(shape, [[[1.0, 0.0], [0.0, 0.0]]])
    f = Operator(shape, [[[0.5, 0.5], [0.5, 0.5]]])
    assert proj_meet(e, f).allclose(Operator.zeros(shape))


def test_lattice_rejects_non_projections():
    x = Operator.diagonal(AlgebraShape.diagonal(2), [2.0, 0.0])
    with pytest.raises(NotProjectionError):
        proj_complement(x)
    with pytest.raises(NotProjectionError):
        proj_meet(x, Operator.identity(x.shape))


def test_abs_op_squares_to_x_star_x():
    rng = np.random.default_rng(3)
    x = random_operator(MIXED, rng)
    a = abs_op(x)
    assert a.is_positive
    assert (a @ a).allclose(x.adjoint() @ x, atol=1e-9)


def test_functional_calculus():
    x = Operator.diagonal(AlgebraShape.diagonal(2), [4.0, 9.0])
    np.testing.assert_allclose(x.apply(np.sqrt).diagonal_values().real, [2.0, 3.0])


def test_random_generators():
    rng = np.random.default_rng(4)
    shape = random_shape(rng)
    assert 1 <= len(shape.blocks) <= 3
    assert all(1 <= d <= 6 for d in shape.dims)
    assert all(0.25 <= w <= 2.0 for w in shape.weights)
    assert random_positive(shape, rng).is_positive
    assert random_contraction(shape, rng).norm_inf == pytest.approx(1.0)
    assert random_projection(shape, rng).is_projection


@settings(max_examples=50, deadline=None)
@given(
    values=st.lists(st.floats(-1e3, 1e3), min_size=1, max_size=6),
    weight=st.floats(0.25, 2.0),
)
def test_trace_is_weighted_sum(values, weight):
    shape = AlgebraShape.diagonal(len(values), weight)
    x = Operator.diagonal(shape, values)
    assert trace(x) == pytest.approx(weight * sum(values), abs=1e-9)


SEEDS = st.integers(0, 2 ** 32 - 1)


@settings(max_examples=30, deadline=None)
@given(seed=SEEDS)
def test_trace_is_cyclic(seed):
    rng = np.random.default_rng(seed)
    shape = random_shape(rng)
    x, y = random_operator(shape, rng), random_operator(shape, rng)
    assert complex(trace(x @ y)) == pytest.approx(complex(trace(y @ x)), rel=1e-9, abs=1e-9)


@settings(max_examples=30, deadline=None)
@given(seed=SEEDS)
def test_trace_of_complement(seed):
    rng = np.random.default_rng(seed)
    shape = random_shape(rng)
    e = random_projection(shape, rng)
    assert float(trace(proj_complement(e)).real) == pytest.approx(
        shape.total_trace - float(trace(e).real), abs=1e-9)


@settings(max_examples=30, deadline=None)
@given(seed=SEEDS, p=st.floats(1.0, 20.0))
def test_contraction_p_norm_is_dominated_by_trace_norm(seed, p):
    rng = np.random.default_rng(seed)
    z = random_contraction(random_shape(rng), rng)
    assert norm_p(z, p) <= norm_p(z, 1.0) ** (1.0 / p) * (1.0 + 1e-9)


@settings(max_examples=30, deadline=None)
@given(seed=SEEDS)
def test_meet_is_idempotent_commutative_and_below_both(seed):
    rng = np.random.default_rng(seed)
    shape = random_shape(rng)
    e, f = random_projection(shape, rng), random_projection(shape, rng)
    meet = proj_meet(e, f)
    assert meet.is_projection
    assert proj_meet(e, e).allclose(e, atol=1e-8)
    assert meet.allclose(proj_meet(f, e), atol=1e-8)
    for p in (e, f):
        assert (p - meet).min_eigenvalue >= -1e-8
        assert (meet @ p).allclose(meet, atol=1e-8)


@settings(max_examples=30, deadline=None)
@given(seed=SEEDS)
def test_meet_of_diagonal_projections_is_pointwise_minimum(seed):
    rng = np.random.default_rng(seed)
    shape = random_shape(rng, max_blocks=6, max_dim=1)
    e, f = random_projection(shape, rng), random_projection(shape, rng)
    expected = np.minimum(e.diagonal_values().real, f.diagonal_values().real)
    np.testing.assert_allclose(proj_meet(e, f).diagonal_values().real, expected, atol=1e-9)


@settings(max_examples=30, deadline=None)
@given(seed=SEEDS)
def test_abs_op_preserves_operator_norm(seed):
    rng = np.random.default_rng(seed)
    x = random_operator(random_shape(rng), rng)
    assert abs_op(x).norm_inf == pytest.approx(x.norm_inf, rel=1e-9)


def test_random_unitary_is_unitary():
    rng = np.random.default_rng(5)
    u = random_unitary(MIXED, rng)
    assert (u.adjoint() @ u).allclose(Operator.identity(MIXED), atol=1e-10)
