from .curves import (
    CurveError,
    PolygonalCurve,
    densify,
    is_convex,
    is_simple,
    point_in_polygon,
    points_in_polygon,
    polygon_area,
    polygon_diameter,
    rectangle,
    regular_polygon,
)
from .io import dump_curve, load_curve, parse_curve
from .mesh import MeshError, TriMesh, triangulate
from .snowflake import Rule, SnowflakeSpec, generate_snowflake, tent_height

__all__ = [
    "CurveError", "PolygonalCurve", "densify", "is_convex", "is_simple", "point_in_polygon",
    "points_in_polygon", "polygon_area", "polygon_diameter", "rectangle", "regular_polygon",
    "dump_curve", "load_curve", "parse_curve", "MeshError", "TriMesh", "triangulate",
    "Rule", "SnowflakeSpec", "generate_snowflake", "tent_height",
]
