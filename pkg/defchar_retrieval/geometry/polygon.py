"""
Mask -> polygon derivation and the polygon quantities the shape features use.

Coordinates are (x, y) pixel coordinates with y pointing down. Contours are
traced through pixel centres; "counter-clockwise" means counter-clockwise as
displayed, i.e. a negative shoelace sum in these coordinates.
"""

from dataclasses import dataclass
from typing import NamedTuple, Sequence, Tuple

import cv2
import numpy as np
from numpy.typing import NDArray
from skimage.draw import polygon as fill_polygon

from defchar_retrieval.config import Config
from defchar_retrieval.exceptions import EmptyMask, InputError, ZeroLengthEdge


@dataclass(frozen=True, eq=False)
class Polygon:
    """Implicitly closed ring of (x, y) vertices."""
    vertices: NDArray[np.float64]

    def __post_init__(self):
        vertices = np.asarray(self.vertices, dtype=np.float64).reshape(-1, 2)
        if len(vertices) < 3:
            raise InputError(f"a polygon needs at least 3 vertices, got {len(vertices)}")
        if not np.all(np.isfinite(vertices)):
            raise InputError("polygon vertices must be finite")
        object.__setattr__(self, 'vertices', vertices)

    def __len__(self) -> int:
        return len(self.vertices)

    def reversed(self) -> 'Polygon':
        return Polygon(self.vertices[::-1].copy())

    @property
    def edge_lengths(self) -> NDArray[np.float64]:
        """Length of edge i, from vertex i to vertex i+1."""
        delta = np.roll(self.vertices, -1, axis=0) - self.vertices
        return np.hypot(delta[:, 0], delta[:, 1])

    @property
    def perimeter(self) -> float:
        return float(self.edge_lengths.sum())


class BoundingBox(NamedTuple):
    width: float
    height: float
    x: float
    y: float


@dataclass(frozen=True, eq=False)
class VertexAngleProfile:
    """Per-vertex angle in degrees and turn direction (-1, 0, +1)."""
    angles: NDArray[np.float64]
    turn_signs: NDArray[np.int8]

    def __len__(self) -> int:
        return len(self.angles)


def _signed_area(vertices: np.ndarray) -> float:
    x, y = vertices[:, 0], vertices[:, 1]
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def _cross_at_vertices(vertices: np.ndarray) -> np.ndarray:
    """Cross product of incoming and outgoing edge vectors at every vertex."""
    incoming = vertices - np.roll(vertices, 1, axis=0)
    outgoing = np.roll(vertices, -1, axis=0) - vertices
    return incoming[:, 0] * outgoing[:, 1] - incoming[:, 1] * outgoing[:, 0]


def _drop_degenerate(points: np.ndarray) -> np.ndarray:
    """Remove repeated and exactly collinear vertices (spurs included) until stable."""
    pts = points
    while len(pts) >= 3:
        distinct = np.any(pts != np.roll(pts, -1, axis=0), axis=1)
        pts_next = pts[distinct]
        if len(pts_next) < 3:
            return pts_next
        turning = _cross_at_vertices(pts_next) != 0
        pts_next = pts_next[turning]
        if len(pts_next) == len(pts):
            return pts
        pts = pts_next
    return pts


def trace_contour(mask: np.ndarray) -> Polygon:
    """Outer boundary of the largest 8-connected component of ``mask``.

    Degenerate contours (single pixels, one-pixel-wide lines) are promoted to
    the component's bounding rectangle so a polygon always exists. Unlike
    traced contours, that rectangle runs along pixel edges: a single pixel
    becomes the unit square around it, not a point.
    """
    mask = np.asarray(mask, dtype=bool)
    if not mask.any():
        raise EmptyMask("cannot trace the contour of an empty mask")

    _, labels, stats, _ = cv2.connectedComponentsWithStats(
        mask.astype(np.uint8), connectivity=8
    )
    label = 1 + int(np.argmax(stats[1:, cv2.CC_STAT_AREA]))
    component = (labels == label).astype(np.uint8)

    contours, _ = cv2.findContours(component, cv2.RETR_EXTERNAL, cv2.CHAIN_APPROX_SIMPLE)
    contour = max(contours, key=len)
    points = _drop_degenerate(contour[:, 0, :].astype(np.float64))

    if len(points) < 3 or _signed_area(points) == 0:
        # pixel-edge rectangle; the through-centre one would have zero area here
        x, y, w, h = (int(v) for v in stats[label, :4])
        points = np.array([[x, y], [x, y + h], [x + w, y + h], [x + w, y]], dtype=np.float64)

    if _signed_area(points) > 0:
        points = points[::-1].copy()
    return Polygon(points)


def _segment_distances(points: np.ndarray, start: np.ndarray, end: np.ndarray) -> np.ndarray:
    """Distance from each point to the segment start-end."""
    seg = end - start
    rel = points - start
    seg_len2 = float(seg @ seg)
    if seg_len2 == 0.0:
        return np.hypot(rel[:, 0], rel[:, 1])
    t = np.clip((rel @ seg) / seg_len2, 0.0, 1.0)
    closest = start + t[:, None] * seg
    diff = points - closest
    return np.hypot(diff[:, 0], diff[:, 1])


def _nearest_indices(vertices: np.ndarray, points: np.ndarray) -> list:
    """Index of the vertex each OpenCV output point came from (OpenCV works in float32)."""
    diff = points[:, None, :].astype(np.float64) - vertices[None, :, :]
    return np.argmin(np.einsum('pvk,pvk->pv', diff, diff), axis=1).tolist()


def _approximate(v: np.ndarray, epsilon: float) -> np.ndarray:
    """approxPolyDP on the closed ring ``v``, topped up to three vertices and cleaned."""
    approx = cv2.approxPolyDP(v.astype(np.float32).reshape(-1, 1, 2), epsilon, closed=True)
    indices = sorted(set(_nearest_indices(v, approx[:, 0, :]))) or [0]
    while len(indices) < 3:
        start, end = v[indices[0]], v[indices[-1]]
        distances = _segment_distances(v, start, end)
        distances[indices] = -1.0
        indices = sorted(indices + [int(np.argmax(distances))])
    return _drop_degenerate(v[indices])


def simplify_polygon(p: Polygon, epsilon: float) -> Polygon:
    """Ramer-Douglas-Peucker on a closed ring, never below 3 distinct vertices.

    ``epsilon = 0`` removes collinear vertices only. When the simplified ring
    collapses (a contour that runs out and back along a one-pixel spur can
    reduce to a repeated vertex), the convex hull of the ring is simplified
    instead. Orientation is preserved.
    """
    if epsilon < 0:
        raise InputError(f"epsilon must be >= 0, got {epsilon}")
    v = p.vertices
    if len(v) <= 3:
        return Polygon(v.copy())

    out = _approximate(v, epsilon)
    if len(out) < 3 or _signed_area(out) == 0:
        hull = cv2.convexHull(v.astype(np.float32).reshape(-1, 1, 2))
        hull = v[_nearest_indices(v, hull[:, 0, :])]
        out = _approximate(hull, epsilon) if len(hull) > 3 else _drop_degenerate(hull)
        if len(out) < 3:
            out = _drop_degenerate(hull)
        if len(out) < 3:
            return Polygon(v.copy())

    if _signed_area(out) * _signed_area(v) < 0:
        out = out[::-1]
    return Polygon(out.copy())


def polygon_area(p: Polygon) -> float:
    """Shoelace area."""
    return abs(_signed_area(p.vertices))


def bounding_box(p: Polygon) -> BoundingBox:
    lo = p.vertices.min(axis=0)
    hi = p.vertices.max(axis=0)
    return BoundingBox(width=float(hi[0] - lo[0]), height=float(hi[1] - lo[1]),
                       x=float(lo[0]), y=float(lo[1]))


def vertex_angles(p: Polygon) -> VertexAngleProfile:
    """Angle between the two edges meeting at each vertex, and the turn sign.

    The angle is taken between the vectors pointing from the vertex to its two
    neighbours, so a square gives 90 and an equilateral triangle 60.
    """
    v = p.vertices
    to_prev = np.roll(v, 1, axis=0) - v
    to_next = np.roll(v, -1, axis=0) - v
    if np.any(np.all(to_prev == 0, axis=1)) or np.any(np.all(to_next == 0, axis=1)):
        raise ZeroLengthEdge("polygon has two consecutive coincident vertices")

    cross = to_prev[:, 0] * to_next[:, 1] - to_prev[:, 1] * to_next[:, 0]
    dot = np.einsum('ij,ij->i', to_prev, to_next)
    angles = np.degrees(np.arctan2(np.abs(cross), dot))
    # incoming x outgoing == -(to_prev x to_next)
    turn_signs = np.sign(-cross).astype(np.int8)
    return VertexAngleProfile(angles=angles, turn_signs=turn_signs)


def polygon_epsilon(p: Polygon,
                    min_epsilon: float = None,
                    relative_epsilon: float = None) -> float:
    """Simplification tolerance: max(min_epsilon, relative_epsilon x bbox diagonal)."""
    if min_epsilon is None:
        min_epsilon = Config.RDP_MIN_EPSILON
    if relative_epsilon is None:
        relative_epsilon = Config.RDP_RELATIVE_EPSILON
    box = bounding_box(p)
    return max(min_epsilon, relative_epsilon * float(np.hypot(box.width, box.height)))


def polygon_from_mask(mask: np.ndarray,
                      min_epsilon: float = None,
                      relative_epsilon: float = None) -> Polygon:
    """Trace the largest component and simplify it with the scale-relative tolerance."""
    contour = trace_contour(mask)
    return simplify_polygon(contour, polygon_epsilon(contour, min_epsilon, relative_epsilon))


def rasterize(rings: Sequence[Sequence[Tuple[float, float]]], shape: Tuple[int, int]) -> np.ndarray:
    """Even-odd fill of one or more (x, y) rings into a boolean mask of ``shape`` (H, W)."""
    mask = np.zeros(shape, dtype=bool)
    for ring in rings:
        pts = np.asarray(ring, dtype=np.float64).reshape(-1, 2)
        if len(pts) < 3:
            raise InputError(f"polygon ring needs at least 3 points, got {len(pts)}")
        rr, cc = fill_polygon(pts[:, 1], pts[:, 0], shape=shape)
        ring_mask = np.zeros(shape, dtype=bool)
        ring_mask[rr, cc] = True
        mask ^= ring_mask
    return mask
