from ._core import (
    StguideError,
    augment,
    data_dir,
    depth_metrics,
    extract,
    lift,
    pointing_stats,
    project,
    run_episode,
    success_stats,
    token_f1,
    traj_errors,
    unproject,
)

__all__ = [
    "StguideError",
    "augment",
    "data_dir",
    "depth_metrics",
    "extract",
    "lift",
    "pointing_stats",
    "project",
    "run_episode",
    "success_stats",
    "token_f1",
    "traj_errors",
    "unproject",
]
