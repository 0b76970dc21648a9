"""Deterministic test solids.

Most fixtures are smooth deformations of a subdivided icosahedron, so they
share its clean triangulation and stay closed and oriented by construction.
Each deformation is exposed as a plain function of unit sphere points so
that analytic checks can evaluate the same surface at any resolution.
"""

import math

import numpy as np

from .errors import BadParams
from .mesh import TriMesh

_ICO_CACHE = {}


def _icosahedron():
    t = (1.0 + math.sqrt(5.0)) / 2.0
    verts = [(-1, t, 0), (1, t, 0), (-1, -t, 0), (1, -t, 0),
             (0, -1, t), (0, 1, t), (0, -1, -t), (0, 1, -t),
             (t, 0, -1), (t, 0, 1), (-t, 0, -1), (-t, 0, 1)]
    faces = [(0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
             (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
             (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
             (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1)]
    v = np.array(verts, dtype=float)
    return v / np.linalg.norm(v, axis=1)[:, None], np.array(faces, dtype=np.int64)


def sphere_points(subdiv):
    """ Unit icosphere ``(vertices, faces)``; ``20 * 4**(subdiv - 1)`` faces. """
    if subdiv < 1 or subdiv > 8:
        raise BadParams("subdiv must be in 1..8", subdiv=subdiv)
    if subdiv in _ICO_CACHE:
        return _ICO_CACHE[subdiv]
    v, f = _icosahedron()
    verts = [tuple(p) for p in v.tolist()]
    faces = f.tolist()
    for _ in range(subdiv - 1):
        mid = {}

        def midpoint(a, b):
            key = (a, b) if a < b else (b, a)
            if key not in mid:
                p = np.add(verts[a], verts[b])
                p /= np.linalg.norm(p)
                verts.append(tuple(p))
                mid[key] = len(verts) - 1
            return mid[key]

        new = []
        for a, b, c in faces:
            ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
            new += [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
        faces = new
    out = (np.array(verts), np.array(faces, dtype=np.int64))
    for arr in out:
        arr.setflags(write=False)
    _ICO_CACHE[subdiv] = out
    return out


def icosphere(subdiv=4, radius=1.0):
    u, f = sphere_points(subdiv)
    return TriMesh(radius * u, f)


# -- smooth deformations of the sphere -------------------------------------

def dent_field(u, dents):
    """ Radial factor ``1 - sum depth * exp(-|u - c|^2 / (2 w^2))``. """
    r = np.ones(len(u))
    for (c, depth, width) in dents:
        c = np.asarray(c, dtype=float)
        c = c / np.linalg.norm(c)
        d2 = np.sum((u - c) ** 2, axis=1)
        r -= depth * np.exp(-d2 / (2 * width * width))
    return r


def dented_map(dents):
    def f(u):
        r = dent_field(u, dents)
        if np.any(r <= 0.05):
            raise BadParams("dents too deep")
        return u * r[:, None]
    return f


def lobe_map(length=1.6, waists=((0.0, 0.45, 0.35),), shift=(0.0, 0.0), wobble=0.0):
    """ Axial deformation ``(x, y, z) -> (w(z) x + s(z), w(z) y, L z)``.

    ``waists`` lists ``(z0, depth, width)`` Gaussian constrictions of the
    lateral scale ``w``; ``shift`` moves slices sideways by
    ``shift[0] * sin(pi z) + shift[1] * z`` which offsets the waists of a
    multi-lobe body from each other.  ``wobble`` tilts the slices in ``y``.
    """
    def f(u):
        x, y, z = u[:, 0], u[:, 1], u[:, 2]
        w = np.ones(len(u))
        for (z0, depth, width) in waists:
            w -= depth * np.exp(-((z - z0) / width) ** 2)
        if np.any(w <= 0.05):
            raise BadParams("waist too deep")
        sx = shift[0] * np.sin(math.pi * z) + shift[1] * z
        sy = wobble * np.cos(math.pi * z)
        return np.stack([w * x + sx, w * y + sy, length * z], axis=1)
    return f


def _falloff(rho, inner, outer):
    """ C2 step: 1 for ``rho <= inner``, 0 for ``rho >= outer``. """
    s = np.clip((rho - inner) / (outer - inner), 0.0, 1.0)
    return 1.0 - s * s * s * (10.0 - 15.0 * s + 6.0 * s * s)


def pleat_map(amplitude, offset, width, quartic=None, zscale=1.0):
    """ Sphere with a local pleat facing ``+x``.

    On the disc ``y^2 + z^2 <= (width/2)^2`` of the front hemisphere the
    surface is exactly the graph ``x = 1 - y^2/2 + A phi(y, z)`` with
    ``phi = z^3 + (y - y0) z`` (cusp), or ``phi = z^4 + t z^2 + (y - y0) z``
    when ``quartic=t`` (swallowtail section).  Between radius ``width/2``
    and ``width`` it blends back to the sphere, so outside that the fold
    under ``+z`` is the equator.  ``zscale`` substitutes ``z / zscale`` for
    ``z`` in ``phi``; values below 1 keep the fold close to the equator
    where it leaves the disc.
    """
    A = float(amplitude)
    R = float(width)
    if not (0 < R < 0.95):
        raise BadParams("pleat width must lie in (0, 0.95)")

    def f(u):
        x, y, z = u[:, 0], u[:, 1], u[:, 2]
        rho = np.sqrt(y * y + z * z)
        win = np.where(x > 0, _falloff(rho, 0.5 * R, R), 0.0)
        Z = z / zscale
        if quartic is None:
            core = A * (Z ** 3 + (y - offset) * Z)
        else:
            core = A * (Z ** 4 + quartic * Z ** 2 + (y - offset) * Z)
        target = 1.0 - 0.5 * y * y + core
        out = np.array(u, dtype=float)
        out[:, 0] = x + win * (target - x)
        if np.any(out[:, 0][win > 0] <= 0.05):
            raise BadParams("pleat too strong")
        return out
    return f


def deformed_sphere(fmap, subdiv):
    u, f = sphere_points(subdiv)
    return TriMesh(fmap(np.asarray(u)), f)


# -- tori and higher genus ---------------------------------------------------

def torus(R=1.0, r=0.4, n=64, m=32, axis=(0.0, 0.0, 1.0), twist=0.0):
    """ Torus of revolution about ``axis`` on an ``n x m`` grid.

    ``twist`` rotates each meridian ring by a fraction of a cell to avoid
    exact symmetry coincidences.
    """
    if not (0 < r < R) or n < 3 or m < 3:
        raise BadParams("torus needs 0 < r < R and n, m >= 3")
    i = np.arange(n)[:, None]
    j = np.arange(m)[None, :]
    th = 2 * math.pi * (i + 0.0) / n
    ph = 2 * math.pi * (j + twist * i / n) / m
    x = (R + r * np.cos(ph)) * np.cos(th)
    y = (R + r * np.cos(ph)) * np.sin(th)
    z = r * np.sin(ph) * np.ones_like(th)
    pts = np.stack([x, y, z], axis=-1).reshape(-1, 3)
    idx = lambda a, b: (a % n) * m + (b % m)
    faces = []
    for a in range(n):
        for b in range(m):
            p, q, s, t = idx(a, b), idx(a + 1, b), idx(a + 1, b + 1), idx(a, b + 1)
            faces.append((p, q, s))
            faces.append((p, s, t))
    pts = pts @ _frame(axis).T
    return TriMesh(pts, np.array(faces, dtype=np.int64))


def torus_map(R, r):
    """ Analytic torus with vertical axis as ``(theta, phi) -> point``. """
    def f(th, ph):
        return np.stack([(R + r * np.cos(ph)) * np.cos(th),
                         (R + r * np.cos(ph)) * np.sin(th),
                         r * np.sin(ph)], axis=-1)
    return f


def _frame(axis):
    """ Rotation taking ``e_z`` to the unit ``axis``. """
    a = np.asarray(axis, dtype=float)
    a = a / np.linalg.norm(a)
    z = np.array([0.0, 0.0, 1.0])
    c = float(np.dot(z, a))
    if c > 1 - 1e-15:
        return np.eye(3)
    if c < -1 + 1e-15:
        return np.diag([1.0, -1.0, -1.0])
    k = np.cross(z, a)
    s = np.linalg.norm(k)
    k = k / s
    K = np.array([[0, -k[2], k[1]], [k[2], 0, -k[0]], [-k[1], k[0], 0]])
    return np.eye(3) + s * K + (1 - c) * K @ K


def genus_surface(genus=2, resolution=48, spacing=1.6, tube=0.22):
    """ Closed surface of the given genus by iso-surfacing a chain of rings.

    The level set of a smooth union of ``genus`` ring tori placed along the
    x axis is triangulated with marching cubes and checked for manifoldness.
    """
    if genus < 1 or genus > 6:
        raise BadParams("genus must be in 1..6", genus=genus)
    from skimage.measure import marching_cubes

    R = spacing / 2.0
    centers = [(k - (genus - 1) / 2.0) * spacing for k in range(genus)]
    lo = np.array([centers[0] - R - 3 * tube, -R - 3 * tube, -3 * tube])
    hi = np.array([centers[-1] + R + 3 * tube, R + 3 * tube, 3 * tube])
    step = (R + 3 * tube) * 2 / resolution
    shape = np.ceil((hi - lo) / step).astype(int) + 1
    # half-step offset keeps sample points off the symmetry planes
    grid = [lo[k] + step * (np.arange(shape[k]) + 0.37) for k in range(3)]
    X, Y, Z = np.meshgrid(*grid, indexing="ij")
    field = np.full(X.shape, np.inf)
    for cx in centers:
        q = np.sqrt((X - cx) ** 2 + Y ** 2) - R
        d = np.sqrt(q * q + Z * Z) - tube
        field = _smooth_min(field, d, 0.15)
    verts, faces, _, _ = marching_cubes(field, level=0.0, spacing=(step,) * 3,
                                        allow_degenerate=False)
    verts = verts + np.array([g[0] for g in grid])
    # marching cubes winding depends on the field sign convention; orient
    # by the enclosed volume instead
    a, b, c = (verts[faces[:, k]] for k in range(3))
    if np.einsum("ij,ij->i", a, np.cross(b, c)).sum() < 0:
        faces = faces[:, ::-1]
    return TriMesh(verts, faces)


def _smooth_min(a, b, k):
    a = np.where(np.isinf(a), b + 10 * k, a)
    h = np.clip(0.5 + 0.5 * (b - a) / k, 0.0, 1.0)
    return b * (1 - h) + a * h - k * h * (1 - h)


def cube(n=4, size=1.0):
    """ Axis-aligned cube with each face split into an ``n x n`` grid. """
    if n < 1:
        raise BadParams("n must be positive")
    pts = {}
    verts = []
    faces = []

    def vid(p):
        key = tuple(int(round(c)) for c in p)
        if key not in pts:
            pts[key] = len(verts)
            verts.append(key)
        return pts[key]

    for axis in range(3):
        for sign in (-1, 1):
            u, w = [(a) for a in range(3) if a != axis]
            for i in range(n):
                for j in range(n):
                    quad = []
                    for (di, dj) in ((0, 0), (1, 0), (1, 1), (0, 1)):
                        p = [0, 0, 0]
                        p[axis] = sign * n
                        p[u] = -n + 2 * (i + di)
                        p[w] = -n + 2 * (j + dj)
                        quad.append(vid(p))
                    a, b, c, d = quad
                    tri = [(a, b, c), (a, c, d)]
                    # orient outward: normal of (u, w) ordering is +axis when parity even
                    normal_sign = sign * (1 if (u, w) in ((1, 2), (0, 1)) else -1)
                    if normal_sign < 0:
                        tri = [(a, c, b), (a, d, c)]
                    faces.extend(tri)
    v = np.array(verts, dtype=float) * (size / (2 * n))
    return TriMesh(v, np.array(faces, dtype=np.int64))


# -- registry ---------------------------------------------------------------

def _get(params, key, default, cast=float):
    val = params.get(key, default)
    try:
        return cast(val)
    except (TypeError, ValueError):
        raise BadParams(f"parameter {key!r} has bad value {val!r}") from None


def make_fixture(kind, params=None):
    """ Build a named fixture mesh.

    Kinds: ``icosphere``, ``torus``, ``genus_n``, ``dented_sphere``,
    ``peanut``, ``cusp_patch``, ``dovetail_patch``, ``cube``.

    Raises
    ------
    BadParams
        Unknown kind or parameter values outside the supported range.
    """
    p = dict(params or {})
    if kind == "icosphere":
        return icosphere(_get(p, "subdiv", 4, int), _get(p, "radius", 1.0))
    if kind == "torus":
        axis = p.get("axis", (0.0, 0.0, 1.0))
        if isinstance(axis, str):
            axis = [float(a) for a in axis.split(",")]
        return torus(_get(p, "R", 1.0), _get(p, "r", 0.4), _get(p, "n", 64, int),
                     _get(p, "m", 32, int), axis, _get(p, "twist", 0.0))
    if kind == "genus_n":
        return genus_surface(_get(p, "genus", 2, int), _get(p, "resolution", 48, int))
    if kind == "dented_sphere":
        dents = p.get("dents")
        if dents is None:
            count = _get(p, "count", 1, int)
            depth = _get(p, "depth", 0.35)
            width = _get(p, "width", 0.3)
            dents = DENT_LAYOUTS.get(count)
            if dents is None:
                raise BadParams("count must be 1 or 2", count=count)
            dents = [(c, depth, width) for c in dents]
        return deformed_sphere(dented_map(dents), _get(p, "subdiv", 6, int))
    if kind == "peanut":
        lobes = _get(p, "lobes", 2, int)
        depth = _get(p, "waist", _get(p, "dent_depth", 0.45))
        fmap = peanut_map(lobes, depth, _get(p, "shift", 0.0), _get(p, "wobble", 0.0))
        return deformed_sphere(fmap, _get(p, "subdiv", 6, int))
    if kind == "cusp_patch":
        return deformed_sphere(pleat_map(_get(p, "amplitude", 1.0), _get(p, "offset", 0.0),
                                         _get(p, "width", 0.8)),
                               _get(p, "subdiv", 6, int))
    if kind == "dovetail_patch":
        # negative amplitude makes the outer fold branches match the equator
        t = _get(p, "t", -0.2)
        if t >= 0:
            raise BadParams("dovetail_patch needs t < 0", t=t)
        return deformed_sphere(pleat_map(_get(p, "amplitude", -0.5), _get(p, "offset", 0.0),
                                         _get(p, "width", 0.85), quartic=t),
                               _get(p, "subdiv", 6, int))
    if kind == "cube":
        return cube(_get(p, "n", 4, int), _get(p, "size", 1.0))
    raise BadParams(f"unknown fixture kind {kind!r}")


DENT_LAYOUTS = {
    1: [(1.0, 0.0, 0.0)],
    2: [(1.0, 0.0, 0.0), (-0.6, 0.8, 0.0)],
}


def peanut_map(lobes=2, depth=0.45, shift=0.0, wobble=0.0):
    if lobes == 2:
        waists = ((0.0, depth, 0.35),)
        length = 1.6
    elif lobes == 3:
        waists = ((-0.33, depth, 0.2), (0.33, depth, 0.2))
        length = 2.2
    else:
        raise BadParams("lobes must be 2 or 3", lobes=lobes)
    return lobe_map(length, waists, (shift, 0.0), wobble)


FIXTURE_KINDS = ("icosphere", "torus", "genus_n", "dented_sphere", "peanut",
                 "cusp_patch", "dovetail_patch", "cube")
