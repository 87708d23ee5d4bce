"""1D U-Net for spectrum-to-spectrum regression.

Encoder: per stage two (conv k5 + rectifier) then max pooling.  Bottleneck:
two conv + rectifier at twice the deepest encoder width.  Decoder: per stage
a transposed convolution (halve channels, double length), concatenation with
the matching encoder stage output along the channel axis, then two conv +
rectifier.  A final linear k5 convolution maps back to one channel.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError
from . import fastops, layers

_DTYPES = {"float32": np.float32, "float64": np.float64}


@dataclass(frozen=True)
class ModelConfig:
    """Shape description of the network; everything else derives from it."""

    in_length: int = 350
    pad_to: int = 352
    kernel_size: int = 5
    encoder_channels: tuple[int, ...] = (32, 64, 128)
    activation: str = "relu"
    seed: int = 0
    dtype: str = "float32"

    def __post_init__(self):
        object.__setattr__(self, "encoder_channels", tuple(int(c) for c in self.encoder_channels))
        if self.kernel_size % 2 == 0 or self.kernel_size < 1:
            raise ConfigError(f"kernel_size must be odd, got {self.kernel_size}")
        if not self.encoder_channels or any(c < 1 for c in self.encoder_channels):
            raise ConfigError("encoder_channels must be positive")
        depth = len(self.encoder_channels)
        if self.pad_to % (2 ** depth) != 0:
            raise ConfigError(f"pad_to {self.pad_to} not divisible by 2^{depth}")
        if self.pad_to < self.in_length or (self.pad_to - self.in_length) % 2 != 0:
            raise ConfigError("pad_to must exceed in_length by an even amount")
        if self.activation != "relu":
            raise ConfigError(f"unsupported activation {self.activation!r}")
        if self.dtype not in _DTYPES:
            raise ConfigError(f"dtype must be one of {sorted(_DTYPES)}")

    @property
    def np_dtype(self):
        return _DTYPES[self.dtype]

    def to_dict(self) -> dict:
        return {
            "in_length": self.in_length,
            "pad_to": self.pad_to,
            "kernel_size": self.kernel_size,
            "encoder_channels": list(self.encoder_channels),
            "activation": self.activation,
            "seed": self.seed,
            "dtype": self.dtype,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ModelConfig":
        return cls(
            in_length=int(d["in_length"]),
            pad_to=int(d["pad_to"]),
            kernel_size=int(d["kernel_size"]),
            encoder_channels=tuple(d["encoder_channels"]),
            activation=str(d["activation"]),
            seed=int(d["seed"]),
            dtype=str(d.get("dtype", "float32")),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))


def parameter_shapes(config: ModelConfig) -> dict[str, tuple[int, ...]]:
    """Ordered parameter name -> shape map for the configured network."""
    k = config.kernel_size
    ch = config.encoder_channels
    shapes: dict[str, tuple[int, ...]] = {}

    def conv(name: str, out_c: int, in_c: int) -> None:
        shapes[f"{name}.w"] = (out_c, in_c, k)
        shapes[f"{name}.b"] = (out_c,)

    prev = 1
    for i, c in enumerate(ch):
        conv(f"enc{i}.conv1", c, prev)
        conv(f"enc{i}.conv2", c, c)
        prev = c
    bott = 2 * ch[-1]
    conv("bottleneck.conv1", bott, ch[-1])
    conv("bottleneck.conv2", bott, bott)
    up_in = bott
    for i in reversed(range(len(ch))):
        shapes[f"up{i}.w"] = (up_in, ch[i], k)
        shapes[f"up{i}.b"] = (ch[i],)
        conv(f"dec{i}.conv1", ch[i], 2 * ch[i])
        conv(f"dec{i}.conv2", ch[i], ch[i])
        up_in = ch[i]
    conv("final", 1, ch[0])
    return shapes


class UNet1D:
    """Parameter container plus forward/backward passes."""

    def __init__(self, config: ModelConfig, params: dict[str, np.ndarray]):
        expected = parameter_shapes(config)
        if list(params) != list(expected):
            raise ConfigError("parameter names do not match the configured architecture")
        for name, arr in params.items():
            if arr.shape != expected[name]:
                raise ConfigError(
                    f"parameter {name}: shape {arr.shape} != expected {expected[name]}"
                )
        self.config = config
        self.params = {n: np.ascontiguousarray(a, dtype=config.np_dtype) for n, a in params.items()}

    @classmethod
    def build(cls, config: ModelConfig) -> "UNet1D":
        """Kaiming fan-in weight init (seeded), zero biases."""
        rng = np.random.default_rng(config.seed)
        params: dict[str, np.ndarray] = {}
        for name, shape in parameter_shapes(config).items():
            if name.endswith(".b"):
                params[name] = np.zeros(shape, dtype=config.np_dtype)
            else:
                fan_in = (shape[1] if not name.startswith("up") else shape[0]) * shape[-1]
                std = np.sqrt(2.0 / fan_in)
                params[name] = (std * rng.standard_normal(shape)).astype(config.np_dtype)
        return cls(config, params)

    @property
    def num_params(self) -> int:
        return int(sum(a.size for a in self.params.values()))

    def _conv_block(self, name: str, h: np.ndarray, cache: dict | None) -> np.ndarray:
        for part in ("conv1", "conv2"):
            z, b_mat = fastops.conv_same(
                h, self.params[f"{name}.{part}.w"], self.params[f"{name}.{part}.b"]
            )
            if cache is not None:
                cache[f"{name}.{part}.B"] = b_mat
                cache[f"{name}.{part}.z"] = z
            h = layers.relu(z)
        return h

    def _forward(self, x: np.ndarray, cache: dict | None) -> np.ndarray:
        cfg = self.config
        if x.ndim != 3 or x.shape[1] != 1 or x.shape[2] != cfg.pad_to:
            raise ValueError(f"input must be (batch, 1, {cfg.pad_to}), got {x.shape}")
        # channels-last execution layout
        h = np.ascontiguousarray(x.transpose(0, 2, 1), dtype=cfg.np_dtype)
        skips = []
        for i in range(len(cfg.encoder_channels)):
            h = self._conv_block(f"enc{i}", h, cache)
            skips.append(h)
            h, local = fastops.maxpool(h)
            if cache is not None:
                cache[f"pool{i}.local"] = local
        h = self._conv_block("bottleneck", h, cache)
        for i in reversed(range(len(cfg.encoder_channels))):
            up, b_mat = fastops.tconv_double(h, self.params[f"up{i}.w"], self.params[f"up{i}.b"])
            if cache is not None:
                cache[f"up{i}.B"] = b_mat
                cache[f"up{i}.len"] = h.shape[1]
            h = np.concatenate([up, skips[i]], axis=2)
            if cache is not None:
                cache[f"dec{i}.split"] = up.shape[2]
            h = self._conv_block(f"dec{i}", h, cache)
        z, b_mat = fastops.conv_same(h, self.params["final.w"], self.params["final.b"])
        if cache is not None:
            cache["final.B"] = b_mat
        return np.ascontiguousarray(z.transpose(0, 2, 1))

    def forward(self, x: np.ndarray) -> np.ndarray:
        """Denoised batch; shape-preserving (batch, 1, pad_to)."""
        return self._forward(x, None)

    def forward_with_cache(self, x: np.ndarray) -> tuple[np.ndarray, dict]:
        cache: dict = {}
        y = self._forward(x, cache)
        return y, cache

    def _conv_block_backward(
        self, name: str, grad: np.ndarray, cache: dict, grads: dict
    ) -> np.ndarray:
        for part in ("conv2", "conv1"):
            grad = layers.relu_backward(grad, cache[f"{name}.{part}.z"])
            grad, gw, gb = fastops.conv_same_backward(
                grad, cache[f"{name}.{part}.B"], self.params[f"{name}.{part}.w"]
            )
            grads[f"{name}.{part}.w"] = gw
            grads[f"{name}.{part}.b"] = gb
        return grad

    def backward(self, cache: dict, grad_y: np.ndarray) -> dict[str, np.ndarray]:
        """Gradients of a scalar loss w.r.t. every parameter, given dL/dy."""
        cfg = self.config
        grads: dict[str, np.ndarray] = {}
        grad = np.ascontiguousarray(grad_y.transpose(0, 2, 1), dtype=cfg.np_dtype)
        grad, gw, gb = fastops.conv_same_backward(grad, cache["final.B"], self.params["final.w"])
        grads["final.w"] = gw
        grads["final.b"] = gb
        skip_grads: dict[int, np.ndarray] = {}
        for i in range(len(cfg.encoder_channels)):
            grad = self._conv_block_backward(f"dec{i}", grad, cache, grads)
            split = cache[f"dec{i}.split"]
            grad_up = np.ascontiguousarray(grad[:, :, :split])
            skip_grads[i] = grad[:, :, split:]
            grad, gw, gb = fastops.tconv_double_backward(
                grad_up, cache[f"up{i}.B"], self.params[f"up{i}.w"], cache[f"up{i}.len"]
            )
            grads[f"up{i}.w"] = gw
            grads[f"up{i}.b"] = gb
        grad = self._conv_block_backward("bottleneck", grad, cache, grads)
        for i in reversed(range(len(cfg.encoder_channels))):
            grad = fastops.maxpool_backward(grad, cache[f"pool{i}.local"])
            grad = grad + skip_grads[i]
            grad = self._conv_block_backward(f"enc{i}", grad, cache, grads)
        return {name: grads[name] for name in self.params}

    def astype(self, dtype: str) -> "UNet1D":
        """Copy of the model with parameters cast to another precision."""
        cfg_dict = self.config.to_dict()
        cfg_dict["dtype"] = dtype
        cfg = ModelConfig.from_dict(cfg_dict)
        return UNet1D(cfg, {n: a.astype(cfg.np_dtype) for n, a in self.params.items()})
