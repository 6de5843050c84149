"""Superpixel segmentation by structural entropy."""

from ._core import (
    DimensionMismatch,
    ImageIoError,
    asa,
    boundary_recall,
    explained_variation,
    min_two_dim_se,
    one_dim_se,
    rgb_to_lab,
    segment,
    select_radius,
    two_dim_se,
    undersegmentation_error,
)

__all__ = [
    "DimensionMismatch",
    "ImageIoError",
    "asa",
    "boundary_recall",
    "explained_variation",
    "min_two_dim_se",
    "one_dim_se",
    "rgb_to_lab",
    "segment",
    "select_radius",
    "two_dim_se",
    "undersegmentation_error",
]
