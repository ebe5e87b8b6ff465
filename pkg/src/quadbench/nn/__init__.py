from .adam import AdamState, NonFiniteGradientError, adam_step
from .checkpoint import (
    decode_array,
    encode_array,
    load_policy_checkpoint,
    net_from_doc,
    net_to_doc,
    save_policy_checkpoint,
)
from .dense import DenseNet, ShapeError, elu, elu_grad
from .gaussian import LOG_STD_MAX, LOG_STD_MIN, GaussianHead

__all__ = [
    "AdamState",
    "DenseNet",
    "GaussianHead",
    "LOG_STD_MAX",
    "LOG_STD_MIN",
    "NonFiniteGradientError",
    "ShapeError",
    "adam_step",
    "decode_array",
    "elu",
    "elu_grad",
    "encode_array",
    "load_policy_checkpoint",
    "net_from_doc",
    "net_to_doc",
    "save_policy_checkpoint",
]
