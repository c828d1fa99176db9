"""Mutual-information registration of 3D scans over voxelized features."""

from ._mireg import (
    AlignmentConfig,
    AlignmentReport,
    ConfigError,
    EmptyOverlap,
    FeatureKind,
    FormatError,
    InvalidArgument,
    IoError,
    NoOverlap,
    align,
    load_cloud,
    matrix_to_pose,
    mutual_information,
    pose_to_matrix,
    save_cloud,
    sweep,
    synth_pair,
    synth_scene,
)

__all__ = [
    "AlignmentConfig",
    "AlignmentReport",
    "ConfigError",
    "EmptyOverlap",
    "FeatureKind",
    "FormatError",
    "InvalidArgument",
    "IoError",
    "NoOverlap",
    "align",
    "load_cloud",
    "matrix_to_pose",
    "mutual_information",
    "pose_to_matrix",
    "save_cloud",
    "sweep",
    "synth_pair",
    "synth_scene",
]
