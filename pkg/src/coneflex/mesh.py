"""Polygon meshes and deterministic Wavefront OBJ output."""
import os
from dataclasses import dataclass

import numpy as np


@dataclass
class Mesh:
    vertices: np.ndarray
    faces: list

    def __post_init__(self):
        self.vertices = np.asarray(self.vertices, dtype=float).reshape(-1, 3)
        self.faces = [tuple(int(i) for i in f) for f in self.faces]

    def face_planarity(self):
        """Largest out-of-plane distance over all faces (scaled by face size)."""
        from .geometry import fit_plane
        worst = 0.0
        for f in self.faces:
            if len(f) > 3:
                worst = max(worst, fit_plane(self.vertices[list(f)])[1])
        return worst


def obj_text(mesh):
    lines = ["v %.17g %.17g %.17g" % tuple(v) for v in mesh.vertices]
    lines += ["f " + " ".join(str(i + 1) for i in f) for f in mesh.faces]
    return "\n".join(lines) + "\n"


def export_obj(mesh, path):
    """Write one mesh to `path`, or a sequence of meshes into directory `path`
    as frame_000.obj, frame_001.obj, ...  Returns the list of written files."""
    if isinstance(mesh, Mesh):
        _write(path, obj_text(mesh))
        return [path]
    meshes = list(mesh)
    os.makedirs(path, exist_ok=True)
    width = max(3, len(str(len(meshes) - 1)))
    out = []
    for i, m in enumerate(meshes):
        p = os.path.join(path, "frame_%0*d.obj" % (width, i))
        _write(p, obj_text(m))
        out.append(p)
    return out


def _write(path, text):
    d = os.path.dirname(path)
    if d:
        os.makedirs(d, exist_ok=True)
    with open(path, "w", newline="\n") as fh:
        fh.write(text)


def read_obj(path):
    verts, faces = [], []
    with open(path) as fh:
        for line in fh:
            parts = line.split()
            if not parts:
                continue
            if parts[0] == "v":
                verts.append([float(x) for x in parts[1:4]])
            elif parts[0] == "f":
                faces.append(tuple(int(p.split("/")[0]) - 1 for p in parts[1:]))
    return Mesh(np.array(verts).reshape(-1, 3), faces)
