from .formats import obj_bytes, parse_obj, wireframe_obj_bytes, write_obj, write_stl_binary
from .surface import Mesh, extract_surface, mesh_area, mesh_volume
from .wireframe import Box3D, Wireframe, bbox_wireframe

__all__ = [
    "Box3D",
    "Mesh",
    "Wireframe",
    "bbox_wireframe",
    "extract_surface",
    "mesh_area",
    "mesh_volume",
    "obj_bytes",
    "parse_obj",
    "wireframe_obj_bytes",
    "write_obj",
    "write_stl_binary",
]
