"""Shape information, shape complexity and meta information."""

import math
from enum import IntEnum
from typing import NamedTuple, Sequence

import numpy as np

from defchar_retrieval.config import Config
from defchar_retrieval.exceptions import DegenerateBox
from defchar_retrieval.features.color import round_half_up
from defchar_retrieval.geometry import Polygon, bounding_box, polygon_area, vertex_angles
from defchar_retrieval.imaging import PatternRecord

SMALL_TURN_DEGREES = 90.0


class NeighbourCategory(IntEnum):
    SHORT = 0
    LONG = 1
    NO_NEIGHBOUR = 2


class ShapeInfo(NamedTuple):
    num_edges: int
    coverage: float
    aspect_ratio: float
    avg_turn_angle: int
    mode_turn_angle: int


class ShapeComplexity(NamedTuple):
    edge_ratio: float
    followed_turns: float
    small_turns: float
    reversed_turns: float


class MetaInfo(NamedTuple):
    defect_size: int
    neighbour: NeighbourCategory


def shape_info(p: Polygon) -> ShapeInfo:
    box = bounding_box(p)
    box_area = box.width * box.height
    if box_area <= 0:
        raise DegenerateBox(f"bounding box {box.width}x{box.height} has zero area")

    angles = vertex_angles(p).angles
    rounded = np.clip(np.floor(angles + 0.5), 1, 180).astype(np.int64)
    mode = int(np.argmax(np.bincount(rounded, minlength=181)))

    return ShapeInfo(
        num_edges=len(p),
        coverage=min(1.0, polygon_area(p) / box_area),
        aspect_ratio=min(box.width, box.height) / max(box.width, box.height),
        avg_turn_angle=min(180, max(1, round_half_up(float(angles.mean())))),
        mode_turn_angle=mode,
    )


def shape_complexity(p: Polygon) -> ShapeComplexity:
    profile = vertex_angles(p)
    lengths = p.edge_lengths
    following = np.roll(lengths, -1)
    edge_ratio = float(np.mean(np.minimum(lengths, following) / np.maximum(lengths, following)))

    signs = profile.turn_signs.astype(np.int64)
    next_signs = np.roll(signs, -1)
    turning = (signs != 0) & (next_signs != 0)
    pairs = float(len(signs))

    return ShapeComplexity(
        edge_ratio=edge_ratio,
        followed_turns=float(np.count_nonzero(turning & (signs == next_signs))) / pairs,
        small_turns=float(np.count_nonzero(profile.angles < SMALL_TURN_DEGREES)) / pairs,
        reversed_turns=float(np.count_nonzero(turning & (signs != next_signs))) / pairs,
    )


def box_gap(a: PatternRecord, b: PatternRecord) -> float:
    """Euclidean gap between two source-coordinate bounding boxes, 0 if they touch or overlap."""
    ax0, ay0, ax1, ay1 = a.source_bbox
    bx0, by0, bx1, by1 = b.source_bbox
    dx = max(0, bx0 - ax1, ax0 - bx1)
    dy = max(0, by0 - ay1, ay0 - by1)
    return math.hypot(dx, dy)


def meta_info(record: PatternRecord,
              siblings: Sequence[PatternRecord] = (),
              neighbour_distance_px: float = None) -> MetaInfo:
    """Defect pixel count and the categorised distance to the nearest sibling pattern."""
    if neighbour_distance_px is None:
        neighbour_distance_px = Config.NEIGHBOUR_DISTANCE_PX

    gaps = [
        box_gap(record, other) for other in siblings
        if other.id != record.id and other.source_image == record.source_image
    ]
    if not gaps:
        neighbour = NeighbourCategory.NO_NEIGHBOUR
    elif min(gaps) <= neighbour_distance_px:
        neighbour = NeighbourCategory.SHORT
    else:
        neighbour = NeighbourCategory.LONG
    return MetaInfo(defect_size=record.pixel_count, neighbour=neighbour)
