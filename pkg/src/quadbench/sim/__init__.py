from .dynamics import (
    ModelArrays,
    SimulationDivergedError,
    drive_map,
    drive_map_arrays,
    step,
    step_batch,
)
from .model import (
    JOINTS_PER_LEG,
    LEG_NAMES,
    LEG_X_SIGN,
    LEG_Y_SIGN,
    MIRROR_LEG_PAIRS,
    NUM_JOINTS,
    RobotModel,
    default_joint_pose,
)
from .state import (
    JOINT_MIRROR_PERM,
    JOINT_MIRROR_SIGN,
    LEG_MIRROR_PERM,
    SimBatch,
    SimState,
    default_state,
    mirror_joint_vector,
    mirror_sim_state,
)
from .terrain import (
    MAX_SLOPE_DEG,
    STEP_HEIGHT,
    Terrain,
    TerrainBatch,
    flat_terrain,
    load_terrain,
    make_terrain,
    save_terrain,
    slopes_terrain,
    steps_terrain,
    terrain_gradient,
    terrain_height,
)
from .trajectory import TrajectoryWriter, dump_trajectory, load_trajectory
