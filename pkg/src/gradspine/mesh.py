"""Closed triangle meshes and ASCII OFF input/output.

A :class:`TriMesh` is the boundary surface of a solid.  Faces are oriented so
that their normals point out of the solid.  The class validates the usual
manifold conditions on construction and caches the adjacency tables used by
the stratification code.
"""

from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np

from .errors import NonManifoldMesh, NotClosed, NotTriangulated, ParseError


@dataclass(frozen=True, eq=False)
class TriMesh:
    """ Closed, oriented, connected triangle mesh.

    Parameters
    ----------
    vertices : array_like, shape (n, 3)
        Vertex coordinates.
    faces : array_like, shape (m, 3)
        Vertex indices, counter-clockwise seen from outside.
    validate : bool
        Run the manifold checks (default).  Disable only for meshes built
        by code that already guarantees them.

    Raises
    ------
    NotClosed
        An edge is used by a single face.
    NonManifoldMesh
        An edge is used by more than two faces, two faces traverse an edge
        in the same direction, a face is degenerate, a vertex is pinched,
        or the surface is disconnected.
    """

    vertices: np.ndarray
    faces: np.ndarray
    validate: bool = field(default=True, repr=False)

    def __post_init__(self):
        v = np.ascontiguousarray(self.vertices, dtype=float)
        f = np.ascontiguousarray(self.faces, dtype=np.int64)
        if v.ndim != 2 or v.shape[1] != 3:
            raise NonManifoldMesh("vertices must have shape (n, 3)")
        if f.ndim != 2 or f.shape[1] != 3:
            raise NotTriangulated("faces must be triangles")
        v.setflags(write=False)
        f.setflags(write=False)
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "faces", f)
        if self.validate:
            self._check()

    # -- validation -------------------------------------------------------

    def _check(self):
        nv = len(self.vertices)
        f = self.faces
        if len(f) == 0:
            raise NotClosed("mesh has no faces")
        if f.min() < 0 or f.max() >= nv:
            raise NonManifoldMesh("face index out of range")
        if np.any((f[:, 0] == f[:, 1]) | (f[:, 1] == f[:, 2]) | (f[:, 0] == f[:, 2])):
            raise NonManifoldMesh("face with repeated vertex")
        scale = self.diagonal
        bad = np.nonzero(self.face_areas <= (1e-12 * scale) ** 2)[0]
        if len(bad):
            raise NonManifoldMesh("degenerate face", face=int(bad[0]))

        directed = {}
        for fi, (a, b, c) in enumerate(f.tolist()):
            for e in ((a, b), (b, c), (c, a)):
                if e in directed:
                    raise NonManifoldMesh("edge traversed twice in one direction",
                                          edge=list(e))
                directed[e] = fi
        for (a, b) in directed:
            if (b, a) not in directed:
                raise NotClosed("boundary edge", edge=[a, b])

        used = np.zeros(nv, dtype=bool)
        used[f.ravel()] = True
        if not used.all():
            raise NonManifoldMesh("isolated vertex", vertex=int(np.argmin(used)))

        # vertex links must be single cycles
        nxt = {}
        for (a, b, c) in f.tolist():
            nxt.setdefault(a, {})[b] = c
            nxt.setdefault(b, {})[c] = a
            nxt.setdefault(c, {})[a] = b
        for vi, ring in nxt.items():
            start = next(iter(ring))
            cur, steps = start, 0
            while True:
                cur = ring[cur]
                steps += 1
                if cur == start:
                    break
            if steps != len(ring):
                raise NonManifoldMesh("pinched vertex", vertex=vi)

        if len(self.components()) != 1:
            raise NonManifoldMesh("surface is not connected")

    def components(self):
        """ Connected components as lists of face indices. """
        parent = list(range(len(self.faces)))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for f0, f1 in self.edge_faces.values():
            if f1 < 0:
                continue
            r0, r1 = find(f0), find(f1)
            if r0 != r1:
                parent[r0] = r1
        groups = {}
        for i in range(len(self.faces)):
            groups.setdefault(find(i), []).append(i)
        return sorted(groups.values())

    # -- geometry ---------------------------------------------------------

    @cached_property
    def diagonal(self):
        lo = self.vertices.min(axis=0)
        hi = self.vertices.max(axis=0)
        return float(np.linalg.norm(hi - lo))

    @cached_property
    def _cross(self):
        p = self.vertices[self.faces]
        return np.cross(p[:, 1] - p[:, 0], p[:, 2] - p[:, 0])

    @cached_property
    def face_areas(self):
        return 0.5 * np.linalg.norm(self._cross, axis=1)

    @cached_property
    def face_normals(self):
        c = self._cross
        return c / np.linalg.norm(c, axis=1)[:, None]

    @cached_property
    def vertex_normals(self):
        """ Area weighted vertex normals. """
        acc = np.zeros_like(self.vertices)
        for k in range(3):
            np.add.at(acc, self.faces[:, k], self._cross)
        return acc / np.linalg.norm(acc, axis=1)[:, None]

    @cached_property
    def barycenters(self):
        return self.vertices[self.faces].mean(axis=1)

    @cached_property
    def mean_edge_length(self):
        p = self.vertices[self.faces]
        lens = np.linalg.norm(p - np.roll(p, 1, axis=1), axis=2)
        return float(lens.mean())

    def volume(self):
        p = self.vertices[self.faces]
        return float(np.einsum("ij,ij->i", p[:, 0], np.cross(p[:, 1], p[:, 2])).sum() / 6.0)

    # -- combinatorics ----------------------------------------------------

    @cached_property
    def edge_faces(self):
        """ Map undirected edge ``(i, j)`` with ``i < j`` to ``(f, g)``.

        ``f`` is the face traversing the edge as ``i -> j``.  On a closed
        mesh both entries are valid face indices.
        """
        out = {}
        for fi, (a, b, c) in enumerate(self.faces.tolist()):
            for (p, q) in ((a, b), (b, c), (c, a)):
                key = (p, q) if p < q else (q, p)
                slot = 0 if p < q else 1
                pair = out.setdefault(key, [-1, -1])
                pair[slot] = fi
        return {k: tuple(v) for k, v in out.items()}

    @cached_property
    def face_neighbors(self):
        """ ``(m, 3)`` array; entry k is the face across edge (k, k+1). """
        ef = self.edge_faces
        out = np.full((len(self.faces), 3), -1, dtype=np.int64)
        for fi, tri in enumerate(self.faces.tolist()):
            for k in range(3):
                p, q = tri[k], tri[(k + 1) % 3]
                key = (p, q) if p < q else (q, p)
                f0, f1 = ef[key]
                out[fi, k] = f1 if f0 == fi else f0
        return out

    @cached_property
    def vertex_faces(self):
        out = [[] for _ in range(len(self.vertices))]
        for fi, tri in enumerate(self.faces.tolist()):
            for v in tri:
                out[v].append(fi)
        return out

    def euler_characteristic(self):
        return len(self.vertices) - len(self.edge_faces) + len(self.faces)

    def genus(self):
        return (2 - self.euler_characteristic()) // 2


# -- OFF ------------------------------------------------------------------

def _tokens(text):
    """ Yield ``(line_number, fields)`` skipping comments and blank lines. """
    for num, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield num, line.split()


def parse_off(text):
    """ Parse ASCII OFF text into a validated :class:`TriMesh`. """
    it = _tokens(text)
    try:
        num, head = next(it)
    except StopIteration:
        raise ParseError("empty file", line=0) from None
    if head[0] != "OFF":
        raise ParseError("missing OFF header", line=num)
    counts = head[1:]
    if not counts:
        try:
            num, counts = next(it)
        except StopIteration:
            raise ParseError("missing counts line", line=num) from None
    try:
        nv, nf = int(counts[0]), int(counts[1])
    except (ValueError, IndexError):
        raise ParseError("bad counts line", line=num) from None
    if nv < 0 or nf < 0:
        raise ParseError("negative counts", line=num)

    verts = []
    for _ in range(nv):
        try:
            num, fields = next(it)
        except StopIteration:
            raise ParseError("unexpected end of file in vertex block", line=num) from None
        try:
            verts.append([float(x) for x in fields[:3]])
        except ValueError:
            raise ParseError("bad vertex line", line=num) from None
        if len(fields) < 3:
            raise ParseError("vertex needs three coordinates", line=num)
    faces = []
    for _ in range(nf):
        try:
            num, fields = next(it)
        except StopIteration:
            raise ParseError("unexpected end of file in face block", line=num) from None
        try:
            k = int(fields[0])
            idx = [int(x) for x in fields[1:1 + k]]
        except (ValueError, IndexError):
            raise ParseError("bad face line", line=num) from None
        if len(idx) != k:
            raise ParseError("face line shorter than its vertex count", line=num)
        if k != 3:
            raise NotTriangulated("face is not a triangle", line=num)
        if min(idx) < 0 or max(idx) >= nv:
            raise ParseError("face index out of range", line=num)
        faces.append(idx)
    if not np.all(np.isfinite(verts)):
        raise ParseError("non-finite coordinate", line=0)
    return TriMesh(np.array(verts, dtype=float).reshape(-1, 3),
                   np.array(faces, dtype=np.int64).reshape(-1, 3))


def load_off(path):
    """ Read an ASCII OFF file.

    Raises
    ------
    ParseError, NotTriangulated, NotClosed
        For malformed files; :class:`NonManifoldMesh` for bad topology.
    """
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}", line=0) from None
    except UnicodeDecodeError:
        raise ParseError(f"{path} is not ASCII text", line=0) from None
    return parse_off(text)


def format_off(mesh):
    lines = ["OFF", f"{len(mesh.vertices)} {len(mesh.faces)} 0"]
    lines += ["%.17g %.17g %.17g" % tuple(p) for p in mesh.vertices.tolist()]
    lines += ["3 %d %d %d" % tuple(t) for t in mesh.faces.tolist()]
    return "\n".join(lines) + "\n"


def write_off(mesh, path):
    Path(path).write_text(format_off(mesh))
