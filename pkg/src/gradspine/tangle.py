"""Double tangent trajectories of a constant field.

A vertical line (parallel to ``v``) that touches two PLUS fold segments and
whose open piece between the two touching points lies inside the solid is a
double tangent trajectory.  They are found as transverse crossings of the
fold segments projected to the plane orthogonal to ``v``.
"""

from dataclasses import dataclass

import numpy as np

from .errors import TripleTangency
from .strata import EPS_REL, unit

EXCLUSION_REL = 1e-7
# a vertical line through a fold point of a piecewise linear surface can
# clip the faces next to it, so crossings within this many mean edge
# lengths of either tangency are not treated as leaving the solid
END_ZONE_EDGES = 2.0
# generic direction for point-in-solid rays
_PARITY_DIR = np.array([0.5773, 0.5821, 0.5725])


def plane_frame(v):
    """ Orthonormal ``(e1, e2)`` spanning the plane orthogonal to ``v``. """
    v = unit(v)
    a = np.array([1.0, 0.0, 0.0]) if abs(v[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    e1 = np.cross(v, a)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(v, e1)
    return e1, e2


@dataclass(frozen=True)
class DoubleTangent:
    """ One double tangent trajectory.

    ``upper`` and ``lower`` are ``(loop, segment, fraction)`` locations of
    the two tangency points; the upper one lies further along ``v``.
    """

    upper: tuple
    lower: tuple
    upper_point: tuple
    lower_point: tuple
    polarity: int

    def as_dict(self):
        return {
            "upper": list(self.upper), "lower": list(self.lower),
            "upper_point": [round(x, 12) for x in self.upper_point],
            "lower_point": [round(x, 12) for x in self.lower_point],
            "polarity": "+" if self.polarity > 0 else "-",
        }


@dataclass(frozen=True)
class Tangle:
    trajectories: tuple
    candidates: int

    @property
    def gc(self):
        return len(self.trajectories)

    @property
    def gc_pol(self):
        """ ``(#positive, #negative)``. """
        pos = sum(1 for t in self.trajectories if t.polarity > 0)
        return pos, self.gc - pos

    def polarity_multiset(self):
        return sorted(t.polarity for t in self.trajectories)

    def as_dict(self):
        pos, neg = self.gc_pol
        return {"gc": self.gc, "gc_pol": {"plus": pos, "minus": neg},
                "signed": pos - neg, "candidates": self.candidates,
                "segments": [t.as_dict() for t in self.trajectories]}


def _segments(folds, plus_only):
    """ Arrays ``(loop, index, a, b)`` of fold segments. """
    loops, idx, a, b = [], [], [], []
    for li, loop in enumerate(folds):
        n = len(loop)
        pts = loop.points
        nxt = np.roll(pts, -1, axis=0)
        keep = loop.plus if plus_only else np.ones(n, dtype=bool)
        sel = np.nonzero(keep)[0]
        loops.append(np.full(len(sel), li))
        idx.append(sel)
        a.append(pts[sel])
        b.append(nxt[sel])
    if not loops:
        z = np.zeros((0, 3))
        return np.zeros(0, int), np.zeros(0, int), z, z
    return (np.concatenate(loops), np.concatenate(idx),
            np.concatenate(a), np.concatenate(b))


def _orient(c, d, p):
    """ 2D orientation of ``p`` relative to the directed line ``c -> d``. """
    return (d[..., 0] - c[..., 0]) * (p[..., 1] - c[..., 1]) - \
           (d[..., 1] - c[..., 1]) * (p[..., 0] - c[..., 0])


def _crossing_pairs(a2, b2, loops, idx, sizes):
    """ Index pairs ``(i, j)``, ``i < j``, of properly crossing 2D segments. """
    n = len(a2)
    if n < 2:
        return []
    lo = np.minimum(a2, b2)
    hi = np.maximum(a2, b2)
    out = []
    for i in range(n - 1):
        j = np.arange(i + 1, n)
        box = np.all(hi[j] >= lo[i], axis=1) & np.all(lo[j] <= hi[i], axis=1)
        j = j[box]
        if len(j) == 0:
            continue
        # neighbours along a loop share an endpoint
        same = loops[j] == loops[i]
        gap = np.abs(idx[j] - idx[i])
        m = sizes[loops[i]]
        adjacent = same & ((gap == 1) | (gap == m - 1))
        j = j[~adjacent]
        if len(j) == 0:
            continue
        o1 = _orient(a2[j], b2[j], a2[i])
        o2 = _orient(a2[j], b2[j], b2[i])
        o3 = _orient(a2[i], b2[i], a2[j])
        o4 = _orient(a2[i], b2[i], b2[j])
        hit = (o1 * o2 < 0) & (o3 * o4 < 0)
        out.extend((i, int(k)) for k in j[hit])
    return out


def _line_hits(mesh, origin, direction, with_faces=False):
    """ Parameters ``lam`` with ``origin + lam * direction`` on a face. """
    p = mesh.vertices[mesh.faces]
    e1 = p[:, 1] - p[:, 0]
    e2 = p[:, 2] - p[:, 0]
    h = np.cross(direction, e2)
    det = np.einsum("ij,ij->i", e1, h)
    ok = np.abs(det) > 1e-300
    inv = np.zeros_like(det)
    inv[ok] = 1.0 / det[ok]
    s = origin - p[:, 0]
    u = np.einsum("ij,ij->i", s, h) * inv
    q = np.cross(s, e1)
    w = (q @ direction) * inv
    lam = np.einsum("ij,ij->i", e2, q) * inv
    hit = ok & (u >= 0) & (w >= 0) & (u + w <= 1)
    if with_faces:
        return lam[hit], np.nonzero(hit)[0]
    return lam[hit]


def point_inside(mesh, point):
    """ Ray parity test along a fixed generic direction. """
    d = _PARITY_DIR / np.linalg.norm(_PARITY_DIR)
    lam = _line_hits(mesh, np.asarray(point, dtype=float), d)
    return int(np.count_nonzero(lam > 0)) % 2 == 1


def segment_interior(mesh, lower, upper, v, zone=None):
    """ Whether the open segment from ``lower`` to ``upper`` is inside.

    The midpoint must pass the parity test and the vertical line may not
    meet the surface strictly between the two end zones.
    """
    diag = mesh.diagonal
    r_par = EXCLUSION_REL * diag
    if zone is None:
        zone = max(r_par, END_ZONE_EDGES * mesh.mean_edge_length)
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    length = float(np.dot(upper - lower, v))
    if length <= 2 * r_par:
        return False
    lam = _line_hits(mesh, lower, v)
    inner = (lam > zone) & (lam < length - zone)
    if np.any(inner):
        return False
    return point_inside(mesh, 0.5 * (lower + upper))


def detect_double_tangents(mesh, direction, folds, eps=EPS_REL):
    """ Double tangent trajectories of ``direction`` for the given folds.

    Parameters
    ----------
    mesh : TriMesh
    direction : array_like
        The (already perturbed) field direction used for ``folds``.
    folds : list of FoldCurve

    Returns
    -------
    Tangle

    Raises
    ------
    TripleTangency
        If a third fold segment passes within ``eps * diagonal`` of a
        projected crossing.
    """
    v = unit(direction)
    e1, e2 = plane_frame(v)
    sizes = np.array([len(f) for f in folds], dtype=int)
    loops, idx, a, b = _segments(folds, plus_only=True)
    P = np.stack([e1, e2], axis=1)
    a2, b2 = a @ P, b @ P
    pairs = _crossing_pairs(a2, b2, loops, idx, sizes)

    tol = eps * mesh.diagonal
    if pairs:
        al, ai, aa, ab = _segments(folds, plus_only=False)
        all_a2, all_b2 = aa @ P, ab @ P

    found = []
    for i, j in pairs:
        # intersection parameters in the plane
        d1 = b2[i] - a2[i]
        d2 = b2[j] - a2[j]
        den = d1[0] * d2[1] - d1[1] * d2[0]
        r = a2[j] - a2[i]
        s = (r[0] * d2[1] - r[1] * d2[0]) / den
        t = (r[0] * d1[1] - r[1] * d1[0]) / den
        pi = a[i] + s * (b[i] - a[i])
        pj = a[j] + t * (b[j] - a[j])
        x = a2[i] + s * d1

        # any other fold segment too close to the crossing
        seg = all_b2 - all_a2
        ll = np.einsum("ij,ij->i", seg, seg)
        tt = np.clip(np.einsum("ij,ij->i", x - all_a2, seg) / np.where(ll > 0, ll, 1), 0, 1)
        dist = np.linalg.norm(all_a2 + tt[:, None] * seg - x, axis=1)
        mine = ((al == loops[i]) & (ai == idx[i])) | ((al == loops[j]) & (ai == idx[j]))
        if np.any((dist < tol) & ~mine):
            raise TripleTangency("three fold points share a projected point",
                                 point=x.tolist())

        hi_, lo_ = (i, j) if np.dot(pi, v) > np.dot(pj, v) else (j, i)
        p_hi = pi if hi_ == i else pj
        p_lo = pj if hi_ == i else pi
        if not segment_interior(mesh, p_lo, p_hi, v):
            continue
        s_hi = s if hi_ == i else t
        s_lo = t if hi_ == i else s
        t_hi = (b[hi_] - a[hi_]) / np.linalg.norm(b[hi_] - a[hi_])
        t_lo = (b[lo_] - a[lo_]) / np.linalg.norm(b[lo_] - a[lo_])
        pol = 1 if np.linalg.det(np.stack([t_lo, t_hi, v])) < 0 else -1
        found.append(DoubleTangent(
            (int(loops[hi_]), int(idx[hi_]), float(s_hi)),
            (int(loops[lo_]), int(idx[lo_]), float(s_lo)),
            tuple(p_hi.tolist()), tuple(p_lo.tolist()), pol))
    found.sort(key=lambda d: (d.upper, d.lower))
    return Tangle(tuple(found), len(pairs))
