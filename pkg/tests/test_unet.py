import numpy as np
import pytest

from specdenoise.errors import ConfigError
from specdenoise.nn.train import mse_loss
from specdenoise.nn.unet import ModelConfig, UNet1D, parameter_shapes

from fdcheck import directional_check, max_rel_err

TINY = ModelConfig(in_length=14, pad_to=16, kernel_size=5, encoder_channels=(2, 4),
                   seed=3, dtype="float64")


def test_model_config_validation():
    with pytest.raises(ConfigError):
        ModelConfig(pad_to=351)  # odd difference
    with pytest.raises(ConfigError):
        ModelConfig(pad_to=354)  # not divisible by 2^3
    with pytest.raises(ConfigError):
        ModelConfig(kernel_size=4)
    with pytest.raises(ConfigError):
        ModelConfig(activation="tanh")


def test_model_config_roundtrip():
    cfg = ModelConfig(encoder_channels=(8, 16), seed=9)
    assert ModelConfig.from_dict(cfg.to_dict()) == cfg


def test_parameter_shapes_default_architecture():
    shapes = parameter_shapes(ModelConfig())
    assert shapes["enc0.conv1.w"] == (32, 1, 5)
    assert shapes["bottleneck.conv1.w"] == (256, 128, 5)
    assert shapes["up2.w"] == (256, 128, 5)
    assert shapes["dec0.conv1.w"] == (32, 64, 5)
    assert shapes["final.w"] == (1, 32, 5)


def test_forward_preserves_shape():
    model = UNet1D.build(TINY)
    x = np.random.default_rng(0).standard_normal((5, 1, 16))
    assert model.forward(x).shape == (5, 1, 16)
    big = UNet1D.build(ModelConfig(encoder_channels=(4, 8), seed=1))
    xb = np.random.default_rng(1).standard_normal((2, 1, 352)).astype(np.float32)
    assert big.forward(xb).shape == (2, 1, 352)


def test_forward_rejects_wrong_length():
    model = UNet1D.build(TINY)
    with pytest.raises(ValueError):
        model.forward(np.zeros((1, 1, 15)))


def test_zero_final_layer_means_zero_output():
    model = UNet1D.build(TINY)
    model.params["final.w"][:] = 0.0
    model.params["final.b"][:] = 0.0
    y = model.forward(np.random.default_rng(2).standard_normal((3, 1, 16)))
    assert not y.any()


def test_build_is_deterministic_per_seed():
    a = UNet1D.build(TINY)
    b = UNet1D.build(TINY)
    for n in a.params:
        assert np.array_equal(a.params[n], b.params[n])
    c = UNet1D.build(ModelConfig(**{**TINY.to_dict(), "seed": 4}))
    assert any(not np.array_equal(a.params[n], c.params[n]) for n in a.params)


def test_rejects_mismatched_parameter_shapes():
    model = UNet1D.build(TINY)
    bad = dict(model.params)
    bad["final.w"] = np.zeros((1, 2, 3))
    with pytest.raises(ConfigError):
        UNet1D(TINY, bad)


def randomized_tiny_model(seed):
    """Tiny model with all parameters (biases included) randomized.

    Zero-initialised biases put whole stretches of pre-activations exactly on
    the rectifier kink, where the gradient is undefined; random biases keep
    the check on differentiable ground, mirroring the tie exclusion for
    pooling.
    """
    rng = np.random.default_rng(seed)
    cfg = ModelConfig(**{**TINY.to_dict(), "seed": seed})
    model = UNet1D.build(cfg)
    for p in model.params.values():
        p += 0.1 * rng.standard_normal(p.shape)
    return model, rng


def kink_margin(cache):
    """Distance of the forward pass from rectifier kinks and pooling ties."""
    z_margin = min(np.abs(cache[k]).min() for k in cache if k.endswith(".z"))
    return z_margin


@pytest.mark.parametrize("seed", range(5))
def test_full_net_gradient_matches_finite_differences(seed):
    # Directional derivative over all parameters vs the assembled backward
    # pass, at 64-bit precision.
    model, rng = randomized_tiny_model(seed)
    x = rng.standard_normal((2, 1, 16))
    target = rng.standard_normal((2, 1, 16))
    y, cache = model.forward_with_cache(x)
    assert kink_margin(cache) > 1e-5
    loss, grad = mse_loss(y, target)
    grads = model.backward(cache, grad)

    def loss_at(params):
        return mse_loss(UNet1D(model.config, params).forward(x), target)[0]

    assert directional_check(loss_at, model.params, grads, rng) < 1e-6


def test_num_params_counts_everything():
    model = UNet1D.build(TINY)
    assert model.num_params == sum(v.size for v in model.params.values())


def test_astype_roundtrip():
    model = UNet1D.build(ModelConfig(**{**TINY.to_dict(), "dtype": "float32"}))
    as64 = model.astype("float64")
    assert as64.config.dtype == "float64"
    for n in model.params:
        assert np.allclose(as64.params[n], model.params[n])
