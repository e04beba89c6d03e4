"""Polygons derived from pattern masks and their shape quantities."""

from .polygon import (
    Polygon, BoundingBox, VertexAngleProfile,
    trace_contour, simplify_polygon, polygon_area, bounding_box, vertex_angles,
    polygon_epsilon, polygon_from_mask, rasterize,
)

__all__ = [
    'Polygon', 'BoundingBox', 'VertexAngleProfile',
    'trace_contour', 'simplify_polygon', 'polygon_area', 'bounding_box', 'vertex_angles',
    'polygon_epsilon', 'polygon_from_mask', 'rasterize',
]
