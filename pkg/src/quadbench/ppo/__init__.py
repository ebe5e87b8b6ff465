from .buffer import RolloutBuffer
from .gae import compute_gae, normalize_advantages
from .telemetry import (
    TELEMETRY_COLUMNS,
    TelemetryWriter,
    read_telemetry,
    symmetry_ratio,
)
from .trainer import (
    POLICY_LAYERS,
    VALUE_LAYERS,
    PolicyBundle,
    PPOConfig,
    Trainer,
    TrainResult,
    collect,
    evaluate_mean_lv,
    lr_at,
    update,
)
