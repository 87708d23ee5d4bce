import numpy as np
import pytest

from specdenoise.nn import layers
from specdenoise.nn import fastops

from fdcheck import central_diff_grad, max_rel_err


# ---------------------------------------------------------------------------
# conv1d

def test_conv1d_identity_kernel():
    rng = np.random.default_rng(0)
    x = rng.standard_normal((2, 1, 20))
    w = np.zeros((1, 1, 5))
    w[0, 0, 2] = 1.0
    y = layers.conv1d(x, w, np.zeros(1))
    assert np.allclose(y, x, atol=1e-14)


def test_conv1d_hand_example():
    x = np.array([[[1.0, 2.0, 3.0]]])
    w = np.array([[[1.0, 1.0, 1.0]]])
    y = layers.conv1d(x, w, np.zeros(1))
    assert np.allclose(y[0, 0], [3.0, 6.0, 5.0], atol=1e-14)


def test_conv1d_zero_input_gives_bias():
    w = np.zeros((3, 2, 5))
    y = layers.conv1d(np.zeros((1, 2, 8)), w, np.array([0.5, -1.0, 2.0]))
    assert np.allclose(y[0, 0], 0.5)
    assert np.allclose(y[0, 1], -1.0)
    assert np.allclose(y[0, 2], 2.0)


def test_conv1d_shape_checks():
    with pytest.raises(ValueError):
        layers.conv1d(np.zeros((1, 2, 8)), np.zeros((3, 1, 5)), np.zeros(3))
    with pytest.raises(ValueError):
        layers.conv1d(np.zeros((1, 1, 8)), np.zeros((1, 1, 4)), np.zeros(1))


def test_conv1d_backward_zero_grad():
    x = np.random.default_rng(0).standard_normal((2, 3, 10))
    w = np.random.default_rng(1).standard_normal((4, 3, 5))
    gx, gw, gb = layers.conv1d_backward(np.zeros((2, 4, 10)), x, w)
    assert not gx.any() and not gw.any() and not gb.any()


def test_conv1d_backward_hand_example():
    x = np.array([[[1.0, 2.0, 3.0]]])
    w = np.array([[[1.0, 1.0, 1.0]]])
    gy = np.array([[[1.0, 0.0, 0.0]]])
    gx, gw, gb = layers.conv1d_backward(gy, x, w)
    assert np.allclose(gw[0, 0], [0.0, 1.0, 2.0], atol=1e-14)
    assert gb[0] == 1.0
    # grad_x: y[0] = x[0]*w[1] + x[1]*w[2] (w[0] hits the zero pad)
    assert np.allclose(gx[0, 0], [1.0, 1.0, 0.0], atol=1e-14)


@pytest.mark.parametrize("seed", range(4))
def test_conv1d_gradients_match_finite_differences(seed):
    rng = np.random.default_rng(seed)
    n, ci, co, length, k = 2, 3, 2, 9, 5
    x = rng.standard_normal((n, ci, length))
    w = rng.standard_normal((co, ci, k))
    b = rng.standard_normal(co)
    gy = rng.standard_normal((n, co, length))

    def loss_x(xv):
        return float(np.sum(layers.conv1d(xv, w, b) * gy))

    def loss_w(wv):
        return float(np.sum(layers.conv1d(x, wv, b) * gy))

    def loss_b(bv):
        return float(np.sum(layers.conv1d(x, w, bv) * gy))

    gx, gw, gb = layers.conv1d_backward(gy, x, w)
    assert max_rel_err(gx, central_diff_grad(loss_x, x)) < 1e-6
    assert max_rel_err(gw, central_diff_grad(loss_w, w)) < 1e-6
    assert max_rel_err(gb, central_diff_grad(loss_b, b)) < 1e-6


# ---------------------------------------------------------------------------
# transposed_conv1d

def test_tconv_length_formula():
    x = np.zeros((1, 1, 4))
    w = np.zeros((1, 1, 5))
    y = layers.transposed_conv1d(x, w, np.zeros(1))
    assert y.shape == (1, 1, 8)


def test_tconv_hand_example():
    # zero-stuffed convolution computed by hand: x=[1,0], w=[1..5] -> [3,4,5,0]
    x = np.array([[[1.0, 0.0]]])
    w = np.array([[[1.0, 2.0, 3.0, 4.0, 5.0]]])
    y = layers.transposed_conv1d(x, w, np.zeros(1))
    assert np.allclose(y[0, 0], [3.0, 4.0, 5.0, 0.0], atol=1e-14)


@pytest.mark.parametrize("seed", range(4))
def test_tconv_gradients_match_finite_differences(seed):
    rng = np.random.default_rng(100 + seed)
    n, ci, co, length = 2, 3, 2, 6
    x = rng.standard_normal((n, ci, length))
    w = rng.standard_normal((ci, co, 5))
    b = rng.standard_normal(co)
    gy = rng.standard_normal((n, co, 2 * length))

    gx, gw, gb = layers.transposed_conv1d_backward(gy, x, w)
    assert max_rel_err(
        gx, central_diff_grad(lambda v: float(np.sum(layers.transposed_conv1d(v, w, b) * gy)), x)
    ) < 1e-6
    assert max_rel_err(
        gw, central_diff_grad(lambda v: float(np.sum(layers.transposed_conv1d(x, v, b) * gy)), w)
    ) < 1e-6
    assert max_rel_err(
        gb, central_diff_grad(lambda v: float(np.sum(layers.transposed_conv1d(x, w, v) * gy)), b)
    ) < 1e-6


# ---------------------------------------------------------------------------
# maxpool1d

def test_maxpool_hand_example():
    y, idx = layers.maxpool1d(np.array([[[1.0, 3.0, 2.0, 2.0]]]))
    assert np.allclose(y[0, 0], [3.0, 2.0])
    # tie in the second window breaks to the first occurrence: index 2
    assert idx[0, 0].tolist() == [1, 2]


def test_maxpool_constant_routes_to_first_element():
    x = np.full((1, 1, 6), 0.7)
    y, idx = layers.maxpool1d(x)
    assert np.allclose(y, 0.7)
    assert idx[0, 0].tolist() == [0, 2, 4]
    gx = layers.maxpool1d_backward(np.ones((1, 1, 3)), idx, 6)
    assert gx[0, 0].tolist() == [1.0, 0.0, 1.0, 0.0, 1.0, 0.0]


def test_maxpool_odd_length_rejected():
    with pytest.raises(ValueError):
        layers.maxpool1d(np.zeros((1, 1, 5)))


@pytest.mark.parametrize("seed", range(4))
def test_maxpool_gradient_matches_finite_differences_away_from_ties(seed):
    rng = np.random.default_rng(200 + seed)
    x = rng.standard_normal((2, 2, 8))  # continuous values: ties have measure zero
    gy = rng.standard_normal((2, 2, 4))

    def loss(xv):
        y, _ = layers.maxpool1d(xv)
        return float(np.sum(y * gy))

    _, idx = layers.maxpool1d(x)
    gx = layers.maxpool1d_backward(gy, idx, 8)
    assert max_rel_err(gx, central_diff_grad(loss, x)) < 1e-6


# ---------------------------------------------------------------------------
# relu

@pytest.mark.parametrize("seed", range(3))
def test_relu_gradient_matches_finite_differences(seed):
    rng = np.random.default_rng(300 + seed)
    x = rng.standard_normal((3, 2, 7)) + 0.05  # keep away from the kink
    gy = rng.standard_normal(x.shape)
    ga = layers.relu_backward(gy, x)
    gfd = central_diff_grad(lambda v: float(np.sum(layers.relu(v) * gy)), x)
    assert max_rel_err(ga, gfd) < 1e-6


# ---------------------------------------------------------------------------
# fast channels-last kernels agree with the reference ops

@pytest.mark.parametrize("seed", range(3))
def test_fastops_conv_matches_reference(seed):
    rng = np.random.default_rng(400 + seed)
    n, ci, co, length = 3, 4, 5, 12
    x = rng.standard_normal((n, ci, length))
    w = rng.standard_normal((co, ci, 5))
    b = rng.standard_normal(co)
    ref = layers.conv1d(x, w, b)
    fast, _ = fastops.conv_same(np.ascontiguousarray(x.transpose(0, 2, 1)), w, b)
    assert np.allclose(fast.transpose(0, 2, 1), ref, atol=1e-12)

    gy = rng.standard_normal(ref.shape)
    gx_r, gw_r, gb_r = layers.conv1d_backward(gy, x, w)
    _, b_mat = fastops.conv_same(np.ascontiguousarray(x.transpose(0, 2, 1)), w, b)
    gx_f, gw_f, gb_f = fastops.conv_same_backward(
        np.ascontiguousarray(gy.transpose(0, 2, 1)), b_mat, w
    )
    assert np.allclose(gx_f.transpose(0, 2, 1), gx_r, atol=1e-12)
    assert np.allclose(gw_f, gw_r, atol=1e-12)
    assert np.allclose(gb_f, gb_r, atol=1e-12)


@pytest.mark.parametrize("seed", range(3))
def test_fastops_tconv_matches_reference(seed):
    rng = np.random.default_rng(500 + seed)
    n, ci, co, length = 2, 3, 4, 6
    x = rng.standard_normal((n, ci, length))
    w = rng.standard_normal((ci, co, 5))
    b = rng.standard_normal(co)
    ref = layers.transposed_conv1d(x, w, b)
    xcl = np.ascontiguousarray(x.transpose(0, 2, 1))
    fast, b_mat = fastops.tconv_double(xcl, w, b)
    assert np.allclose(fast.transpose(0, 2, 1), ref, atol=1e-12)

    gy = rng.standard_normal(ref.shape)
    gx_r, gw_r, gb_r = layers.transposed_conv1d_backward(gy, x, w)
    gx_f, gw_f, gb_f = fastops.tconv_double_backward(
        np.ascontiguousarray(gy.transpose(0, 2, 1)), b_mat, w, length
    )
    assert np.allclose(gx_f.transpose(0, 2, 1), gx_r, atol=1e-12)
    assert np.allclose(gw_f, gw_r, atol=1e-12)
    assert np.allclose(gb_f, gb_r, atol=1e-12)


def test_fastops_maxpool_matches_reference():
    rng = np.random.default_rng(7)
    x = rng.standard_normal((3, 4, 10))
    y_r, idx = layers.maxpool1d(x)
    y_f, local = fastops.maxpool(np.ascontiguousarray(x.transpose(0, 2, 1)))
    assert np.allclose(y_f.transpose(0, 2, 1), y_r, atol=1e-14)
    gy = rng.standard_normal(y_r.shape)
    gx_r = layers.maxpool1d_backward(gy, idx, 10)
    gx_f = fastops.maxpool_backward(np.ascontiguousarray(gy.transpose(0, 2, 1)), local)
    assert np.allclose(gx_f.transpose(0, 2, 1), gx_r, atol=1e-14)
