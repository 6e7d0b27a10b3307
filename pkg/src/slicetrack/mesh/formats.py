"""Mesh writers: ASCII OBJ and binary STL, plus a small OBJ parser.

OBJ vertices are written with 6 decimal places so golden files are byte
stable. STL is the standard 80-byte header, uint32 triangle count, and
50-byte triangle records with normals computed from the winding.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .surface import Mesh
from .wireframe import Wireframe


def obj_bytes(mesh: Mesh) -> bytes:
    lines = [f"v {x:.6f} {y:.6f} {z:.6f}" for x, y, z in mesh.vertices]
    lines += [f"f {a + 1} {b + 1} {c + 1}" for a, b, c in mesh.triangles]
    return ("\n".join(lines) + "\n" if lines else "").encode("ascii")


def write_obj(mesh: Mesh, path: str | Path) -> None:
    Path(path).write_bytes(obj_bytes(mesh))


def wireframe_obj_bytes(frame: Wireframe) -> bytes:
    lines = [f"v {x:.6f} {y:.6f} {z:.6f}" for x, y, z in frame.vertices]
    lines += [f"l {a + 1} {b + 1}" for a, b in frame.segments]
    return ("\n".join(lines) + "\n" if lines else "").encode("ascii")


def parse_obj(text: str) -> Mesh:
    """Reference OBJ parser for v/f records (triangles only)."""
    mesh = Mesh()
    for lineno, line in enumerate(text.splitlines(), start=1):
        parts = line.split()
        if not parts or parts[0] in ("#", "l"):
            continue
        if parts[0] == "v":
            if len(parts) != 4:
                raise ValueError(f"line {lineno}: bad vertex record")
            mesh.vertices.append(tuple(float(p) for p in parts[1:4]))
        elif parts[0] == "f":
            if len(parts) != 4:
                raise ValueError(f"line {lineno}: only triangle faces supported")
            idx = tuple(int(p.split("/")[0]) - 1 for p in parts[1:4])
            if any(i < 0 or i >= len(mesh.vertices) for i in idx):
                raise ValueError(f"line {lineno}: face index out of range")
            mesh.triangles.append(idx)
        else:
            raise ValueError(f"line {lineno}: unsupported record {parts[0]!r}")
    return mesh


def write_stl_binary(mesh: Mesh, path: str | Path) -> None:
    header = b"binary STL surface".ljust(80, b"\x00")
    out = bytearray(header)
    out += struct.pack("<I", len(mesh.triangles))
    verts = np.asarray(mesh.vertices, dtype=np.float64)
    for a, b, c in mesh.triangles:
        va, vb, vc = verts[a], verts[b], verts[c]
        normal = np.cross(vb - va, vc - va)
        norm = np.linalg.norm(normal)
        if norm > 0:
            normal = normal / norm
        out += struct.pack("<3f", *normal)
        for v in (va, vb, vc):
            out += struct.pack("<3f", *v)
        out += struct.pack("<H", 0)
    Path(path).write_bytes(bytes(out))
