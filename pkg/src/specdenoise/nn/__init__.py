"""From-scratch 1D convolutional U-Net: layers, model, training, checkpoints."""

from .layers import (
    conv1d,
    conv1d_backward,
    maxpool1d,
    maxpool1d_backward,
    relu,
    relu_backward,
    transposed_conv1d,
    transposed_conv1d_backward,
)
from .unet import ModelConfig, UNet1D
from .train import (
    AdamState,
    EarlyStopper,
    EpochRecord,
    TrainConfig,
    adam_step,
    denoise_values,
    init_adam_state,
    mse_loss,
    train,
)
from .checkpoint import Checkpoint, load_checkpoint, save_checkpoint

__all__ = [
    "AdamState",
    "Checkpoint",
    "EarlyStopper",
    "EpochRecord",
    "ModelConfig",
    "TrainConfig",
    "UNet1D",
    "adam_step",
    "conv1d",
    "conv1d_backward",
    "denoise_values",
    "init_adam_state",
    "load_checkpoint",
    "maxpool1d",
    "maxpool1d_backward",
    "mse_loss",
    "relu",
    "relu_backward",
    "save_checkpoint",
    "train",
    "transposed_conv1d",
    "transposed_conv1d_backward",
]
