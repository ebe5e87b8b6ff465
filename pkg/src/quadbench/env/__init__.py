from .commands import ZERO_COMMAND, Command, CommandRanges, sample_command
from .curriculum import (
    TERRAIN_SEQUENCE,
    CurriculumConfig,
    CurriculumState,
    advance_curriculum,
)
from .locomotion import (
    OUTCOME_CONTINUE,
    OUTCOME_FELL,
    OUTCOME_TIMEOUT,
    BatchedLocomotionEnv,
    EnvConfig,
    EpisodeDoneError,
    LocomotionEnv,
    check_reset,
)
from .observation import (
    ANG_VEL,
    ATTITUDE,
    BLOCK_SLICES,
    COMMAND,
    JOINT_POS,
    JOINT_VEL,
    LAST_ACTION,
    LIN_VEL,
    OBS_DIM,
    observe,
    observe_batch,
)
from .randomization import RandomizationConfig, randomize, sample_scales
from .rewards import REWARD_TERM_NAMES, RewardWeights, reward_terms, total_reward
