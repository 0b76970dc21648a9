"""Boundary stratification of a solid under a constant vertical field.

For a unit vector ``v`` and the outward vertex normals ``n`` of a closed mesh
the scalar ``g = <n, v>`` is linearly interpolated over every triangle.  The
set ``g < 0`` (``v`` entering the solid) is the PLUS region, its complement the
MINUS region, and the zero set is a family of fold loops.  A fold segment is
PLUS when the tangential part of ``v`` points into the PLUS region; cusps sit
where the segment label flips.

All Euler characteristics are computed on the full subcomplexes spanned by the
negative (resp. positive) vertices, which are deformation retracts of the two
regions of the piecewise linear split, so every count is an exact integer.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (BadParams, OpenFoldChain, PerturbationExhausted,
                     TangencyDegenerate)

EPS_REL = 1e-9
MAX_RETRIES = 16
MAX_ANGLE = 1e-6


def unit(v):
    v = np.asarray(v, dtype=float).reshape(3)
    n = float(np.linalg.norm(v))
    if not np.isfinite(n) or n == 0.0:
        raise BadParams("direction must be a non-zero finite 3-vector")
    return v / n


def rotate(v, axis, angle):
    """ Rodrigues rotation of ``v`` about the unit ``axis``. """
    c, s = math.cos(angle), math.sin(angle)
    return v * c + np.cross(axis, v) * s + axis * np.dot(axis, v) * (1 - c)


def jitter(v, seed, attempt, max_angle=MAX_ANGLE):
    """ Deterministic small rotation of ``v`` used to restore genericity.

    Returns the rotated vector together with a record of the rotation.
    """
    rng = np.random.default_rng([int(seed), int(attempt)])
    w = rng.normal(size=3)
    w -= np.dot(w, v) * v
    axis = w / np.linalg.norm(w)
    angle = float(rng.uniform(0.25, 1.0) * max_angle)
    out = unit(rotate(v, axis, angle))
    return out, {"attempt": int(attempt), "axis": axis.tolist(), "angle": angle}


# -- labels ---------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class RegionLabeling:
    """ Per-vertex ``g`` and per-face signs for one direction.

    ``direction`` is the vector actually used, which differs from
    ``requested`` when a perturbation was needed.
    """

    mesh: object
    direction: np.ndarray
    requested: np.ndarray
    g: np.ndarray
    plus_faces: np.ndarray
    seed: int = 0
    perturbations: tuple = ()

    @property
    def perturbed(self):
        return bool(self.perturbations)

    def plus_count(self):
        return int(self.plus_faces.sum())


def _values(mesh, v):
    return mesh.vertex_normals @ v


def classify_regions(mesh, direction, seed=0, start_attempt=0, eps=EPS_REL):
    """ Label faces PLUS (``g < 0`` at the barycenter) or MINUS.

    When a vertex has ``|g| < eps`` the direction is rotated by at most
    ``1e-6`` rad with a generator seeded by ``(seed, attempt)``; after
    ``MAX_RETRIES`` failed attempts :class:`PerturbationExhausted` is raised.
    """
    requested = unit(direction)
    v = requested
    log = []
    attempt = start_attempt
    if start_attempt:
        v, rec = jitter(requested, seed, attempt)
        log.append(rec)
    while True:
        g = _values(mesh, v)
        if np.min(np.abs(g)) >= eps:
            break
        attempt += 1
        if attempt > start_attempt + MAX_RETRIES:
            raise PerturbationExhausted("no generic direction found",
                                        seed=seed, attempts=attempt - start_attempt)
        v, rec = jitter(requested, seed, attempt)
        log.append(rec)
    plus = g[mesh.faces].mean(axis=1) < 0
    g.setflags(write=False)
    plus.setflags(write=False)
    return RegionLabeling(mesh, v, requested, g, plus, int(seed), tuple(log))


# -- folds ----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FoldCurve:
    """ One closed fold loop.

    ``points[i]`` lies on mesh edge ``edges[i]``; segment ``i`` joins point
    ``i`` to point ``i + 1`` (cyclically) inside face ``faces[i]`` and carries
    the label ``plus[i]``.  The loop runs with the PLUS region on its left
    seen from outside the solid.
    """

    points: np.ndarray
    edges: tuple
    faces: np.ndarray
    plus: np.ndarray
    params: np.ndarray

    def __len__(self):
        return len(self.points)

    @property
    def tangents(self):
        d = np.roll(self.points, -1, axis=0) - self.points
        return d / np.linalg.norm(d, axis=1)[:, None]

    def is_plus_loop(self):
        return bool(self.plus.all())

    def is_minus_loop(self):
        return not self.plus.any()

    def point_at(self, i, s):
        """ Point at fraction ``s`` along segment ``i``. """
        n = len(self.points)
        a, b = self.points[i % n], self.points[(i + 1) % n]
        return (1 - s) * a + s * b


def _face_gradients(mesh, g):
    """ Gradient of the linear interpolant of ``g`` on every face. """
    p = mesh.vertices[mesh.faces]
    gv = g[mesh.faces]
    e1 = p[:, 1] - p[:, 0]
    e2 = p[:, 2] - p[:, 0]
    n = np.cross(e1, e2)
    nn = np.einsum("ij,ij->i", n, n)
    d1 = gv[:, 1] - gv[:, 0]
    d2 = gv[:, 2] - gv[:, 0]
    grad = (d1[:, None] * np.cross(e2, n) + d2[:, None] * np.cross(n, e1)) / nn[:, None]
    return grad


def extract_folds(labeling):
    """ Trace the zero set of the interpolated ``g`` into oriented loops.

    Raises
    ------
    OpenFoldChain
        If a fold chain cannot be closed (only possible on a mesh with a
        hole).
    TangencyDegenerate
        If ``v`` is exactly tangent to a fold segment's level direction, so
        the segment label is undefined.
    """
    mesh = labeling.mesh
    g = labeling.g
    v = labeling.direction
    faces = mesh.faces
    neg = g < 0

    fneg = neg[faces].sum(axis=1)
    mixed = np.nonzero((fneg > 0) & (fneg < 3))[0]
    if len(mixed) == 0:
        return []
    grad = _face_gradients(mesh, g)
    normals = mesh.face_normals

    point_of = {}
    succ = {}
    seg_face = {}
    for fi in mixed.tolist():
        tri = faces[fi].tolist()
        cut = []
        for k in range(3):
            a, b = tri[k], tri[(k + 1) % 3]
            if neg[a] != neg[b]:
                cut.append((a, b) if a < b else (b, a))
        if len(cut) != 2:
            raise OpenFoldChain("mixed face without two crossing edges", face=fi)
        for e in cut:
            if e not in point_of:
                a, b = e
                t = g[a] / (g[a] - g[b])
                point_of[e] = (t, (1 - t) * mesh.vertices[a] + t * mesh.vertices[b])
        p0, p1 = point_of[cut[0]][1], point_of[cut[1]][1]
        d = p1 - p0
        side = np.dot(np.cross(normals[fi], d), grad[fi])
        if side == 0.0:
            raise TangencyDegenerate("fold segment of zero length", face=fi)
        start, end = (cut[0], cut[1]) if side < 0 else (cut[1], cut[0])
        if start in succ:
            raise OpenFoldChain("fold point with two successors", edge=list(start))
        succ[start] = end
        seg_face[start] = fi

    loops = []
    seen = set()
    for e0 in sorted(succ):
        if e0 in seen:
            continue
        chain = [e0]
        seen.add(e0)
        cur = e0
        while True:
            nxt = succ.get(cur)
            if nxt is None:
                raise OpenFoldChain("fold chain ends", edge=list(cur))
            if nxt == e0:
                break
            if nxt in seen:
                raise OpenFoldChain("fold chains merge", edge=list(nxt))
            chain.append(nxt)
            seen.add(nxt)
            cur = nxt
        fidx = np.array([seg_face[e] for e in chain], dtype=np.int64)
        slope = grad[fidx] @ v
        if np.any(slope == 0.0):
            raise TangencyDegenerate("field tangent to a fold segment",
                                     face=int(fidx[np.argmin(np.abs(slope))]))
        pts = np.array([point_of[e][1] for e in chain])
        prm = np.array([point_of[e][0] for e in chain])
        loops.append(FoldCurve(pts, tuple(chain), fidx, slope < 0, prm))
    return loops


# -- cusps ----------------------------------------------------------------

@dataclass(frozen=True)
class Cusp:
    """ A label change along a fold loop.

    ``index`` is the fold point of ``loop`` where the label changes; the
    segment ending there has the opposite label of the one starting there.
    """

    loop: int
    index: int
    point: tuple
    first: int
    second: int

    @property
    def ab_class(self):
        return "A" if self.first == self.second else "B"

    @property
    def flavor(self):
        return ("p" if self.first > 0 else "m") + ("p" if self.second > 0 else "m")

    @property
    def entering_plus(self):
        """ True when the PLUS segment follows the cusp along the loop. """
        return self.ab_class == "A"


def extract_cusps(folds, direction):
    """ Cusps of every loop with both polarities.

    The first polarity is ``+1`` when ``v`` points along the fold into the
    PLUS segment; the second is ``+1`` when ``v`` agrees with the loop
    orientation.

    Raises
    ------
    TangencyDegenerate
        If ``v`` is orthogonal to the fold at a label change.
    """
    v = unit(direction)
    out = []
    for li, loop in enumerate(folds):
        n = len(loop)
        lab = loop.plus
        if lab.all() or not lab.any():
            continue
        tan = loop.tangents
        for i in range(n):
            before, after = lab[i - 1], lab[i]
            if before == after:
                continue
            tau = float(np.dot(v, tan[i - 1] + tan[i]))
            if tau == 0.0:
                raise TangencyDegenerate("field orthogonal to fold at a cusp",
                                         loop=li, index=i)
            second = 1 if tau > 0 else -1
            into_plus = after if second > 0 else before
            first = 1 if into_plus else -1
            out.append(Cusp(li, i, tuple(loop.points[i].tolist()), first, second))
    return out


def _loop_cusps(cusps):
    by = {}
    for c in cusps:
        by.setdefault(c.loop, []).append(c)
    for lst in by.values():
        lst.sort(key=lambda c: c.index)
    return by


@dataclass(frozen=True)
class PlusArc:
    loop: int
    start: int
    end: int
    kind: str


@dataclass(frozen=True)
class ArcCensus:
    A: int
    B: int
    C: int
    plus_loops: int
    arcs: tuple = ()

    def as_dict(self):
        return {"A": self.A, "B": self.B, "C": self.C, "plus_loops": self.plus_loops}


def plus_arcs(folds, cusps):
    """ Maximal PLUS arcs as ``PlusArc`` records in loop order. """
    arcs = []
    for li, lst in sorted(_loop_cusps(cusps).items()):
        k = len(lst)
        for j, c in enumerate(lst):
            if not c.entering_plus:
                continue
            d = lst[(j + 1) % k]
            ends = {c.first, d.first}
            kind = "A" if ends == {1} else ("B" if ends == {-1} else "C")
            arcs.append(PlusArc(li, c.index, d.index, kind))
    return arcs


def classify_arcs(folds, cusps):
    """ Count PLUS arcs by the first polarities of their end cusps.

    ``A``: both ends in the positive cusp set, ``B``: both negative,
    ``C``: mixed.  Cusp-free PLUS loops are counted separately.
    """
    arcs = plus_arcs(folds, cusps)
    kinds = [a.kind for a in arcs]
    loops = sum(1 for f in folds if f.is_plus_loop())
    return ArcCensus(kinds.count("A"), kinds.count("B"), kinds.count("C"),
                     loops, tuple(arcs))


# -- Euler characteristics ------------------------------------------------

def _induced_chi(mesh, mask):
    f = mesh.faces
    nv = int(mask.sum())
    ne = sum(1 for (a, b) in mesh.edge_faces if mask[a] and mask[b])
    nf = int(mask[f].all(axis=1).sum())
    return nv - ne + nf


def region_euler(labeling):
    """ ``(chi_plus, chi_minus)`` of the two regions of the split surface. """
    neg = labeling.g < 0
    return _induced_chi(labeling.mesh, neg), _induced_chi(labeling.mesh, ~neg)


def fold_walk_degree(mesh, folds, direction):
    """ Rotation of ``v`` against the fold frame, summed over loops.

    Along each loop the angle of ``v`` is measured in the frame
    ``(t, n x t)`` where ``t`` is the segment direction and ``n x t`` points
    into the PLUS region.  The total turning divided by ``2 pi`` is returned
    as a float; callers round it after checking it is integral.
    """
    v = unit(direction)
    total = 0.0
    for loop in folds:
        tan = loop.tangents
        nrm = np.cross(mesh.face_normals[loop.faces], tan)
        ang = np.arctan2(nrm @ v, tan @ v)
        dif = np.diff(np.append(ang, ang[0]))
        dif = (dif + np.pi) % (2 * np.pi) - np.pi
        total += float(dif.sum())
    return total / (2 * np.pi)


# -- report ---------------------------------------------------------------

@dataclass
class IdentityReport:
    chi_X: int
    chi_boundary: int
    chi_d1p: int
    chi_d1m: int
    chi_d2p_arcs: int
    d2p_loops: int
    cusps: dict
    arcs: dict
    deg_h: int = 0
    deg_h_raw: float = 0.0
    gauss_degree: int = 0
    checks: dict = field(default_factory=dict)
    observed_difference_sign: int = 0
    refined: dict = field(default_factory=dict)

    @property
    def n_plus_cusps(self):
        return self.cusps["pp"] + self.cusps["pm"]

    @property
    def n_minus_cusps(self):
        return self.cusps["mp"] + self.cusps["mm"]

    def all_pass(self):
        return all(self.checks.values())

    def as_dict(self):
        return {
            "chi_X": self.chi_X,
            "chi_boundary": self.chi_boundary,
            "chi_d1p": self.chi_d1p,
            "chi_d1m": self.chi_d1m,
            "chi_d2p_arcs": self.chi_d2p_arcs,
            "d2p_loops": self.d2p_loops,
            "cusps": dict(self.cusps),
            "arcs": dict(self.arcs),
            "deg_h": self.deg_h,
            "gauss_degree": self.gauss_degree,
            "identities": dict(self.checks),
            "observed_difference_sign": self.observed_difference_sign,
            "refined_degree": dict(self.refined),
        }


def strata_euler(labeling, folds, cusps):
    """ Euler characteristic fields of the report (no identity flags). """
    mesh = labeling.mesh
    chi_p, chi_m = region_euler(labeling)
    chi_b = mesh.euler_characteristic()
    census = classify_arcs(folds, cusps)
    counts = {"pp": 0, "pm": 0, "mp": 0, "mm": 0}
    for c in cusps:
        counts[c.flavor] += 1
    return IdentityReport(
        chi_X=chi_b // 2,
        chi_boundary=chi_b,
        chi_d1p=chi_p,
        chi_d1m=chi_m,
        chi_d2p_arcs=census.A + census.B + census.C,
        d2p_loops=census.plus_loops,
        cusps=counts,
        arcs=census.as_dict(),
    )


def verify_identities(report, labeling, folds, cusps):
    """ Fill in degrees and identity flags.  Nothing is asserted here. """
    mesh = labeling.mesh
    raw = fold_walk_degree(mesh, folds, labeling.direction)
    deg = int(round(raw))
    report.deg_h_raw = raw
    report.deg_h = deg
    p3 = report.n_plus_cusps
    m3 = report.n_minus_cusps
    gauss = report.chi_d1p - report.chi_d2p_arcs + p3
    report.gauss_degree = gauss

    n_a = sum(1 for c in cusps if c.ab_class == "A")
    n_b = len(cusps) - n_a
    per_loop = True
    for lst in _loop_cusps(cusps).values():
        a = sum(1 for c in lst if c.ab_class == "A")
        per_loop &= (2 * a == len(lst))

    diff = report.chi_d1p - report.chi_d1m
    cdiff = p3 - m3
    if diff == 0 and cdiff == 0:
        sign = 0
    elif diff == cdiff:
        sign = 1
    elif diff == -cdiff:
        sign = -1
    else:
        sign = 2  # neither sign fits

    report.checks = {
        "alternating_sum": report.chi_X - report.chi_d1p + report.chi_d2p_arcs - p3 == 0,
        "gauss_degree": gauss == report.chi_boundary // 2
        and report.chi_boundary % 2 == 0,
        "cusp_parity": cdiff % 2 == 0,
        "degree_relation": abs(raw - deg) < 1e-6 and cdiff == 2 * deg,
        "chi_plus_formula": 2 * report.chi_d1p == 2 * report.chi_X + m3 - p3,
        "chi_difference_abs": abs(diff) == abs(cdiff),
        "class_balance": n_a == n_b and per_loop,
        "region_sum": report.chi_d1p + report.chi_d1m == report.chi_boundary,
    }
    report.observed_difference_sign = sign
    c = report.cusps
    alt = report.chi_X - 2 * report.chi_d1p
    report.refined = {
        "plus_oplus_minus_minus_oplus": c["pp"] - c["mp"],
        "plus_ominus_minus_minus_ominus": c["pm"] - c["mm"],
        "chi_X_minus_twice_chi_d1p": alt,
        "discrepancy": alt - deg,
    }
    return report


# -- pipeline -------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Stratification:
    labeling: RegionLabeling
    folds: list
    cusps: list
    arcs: ArcCensus
    report: IdentityReport

    @property
    def direction(self):
        return self.labeling.direction

    @property
    def mesh(self):
        return self.labeling.mesh


def stratify(mesh, direction, seed=0):
    """ Run labels, folds, cusps, arcs and identities with retries.

    A :class:`TangencyDegenerate` at any stage triggers the next seeded
    perturbation of the direction.
    """
    attempt = 0
    while True:
        lab = classify_regions(mesh, direction, seed=seed, start_attempt=attempt)
        try:
            folds = extract_folds(lab)
            cusps = extract_cusps(folds, lab.direction)
        except TangencyDegenerate:
            attempt = (lab.perturbations[-1]["attempt"] if lab.perturbations else attempt) + 1
            if attempt > MAX_RETRIES:
                raise PerturbationExhausted("degenerate tangencies persist",
                                            seed=seed) from None
            continue
        report = strata_euler(lab, folds, cusps)
        verify_identities(report, lab, folds, cusps)
        return Stratification(lab, folds, cusps, classify_arcs(folds, cusps), report)
