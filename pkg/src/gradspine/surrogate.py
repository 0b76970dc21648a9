"""Fold diagrams and marked spines drawn from a stratified mesh.

Every PLUS fold arc is flowed along ``-v`` onto the PLUS region, where it
lands on a curve.  The landing curves, cut where one fold passes over
another, are the triple lines of a marked spine whose 2-cells are the
pieces of the PLUS region they cut out.  Waterfalls (the strips swept by
the flow between a fold and its landing curve) are absorbed into the
region they hang from; they do not change Euler characteristics.

Roles at a crossing with upper fold ``A`` and lower fold ``B``::

    a   the landing of ``A`` beyond ``B``
    b   the landing of ``A`` on the near side of ``B``, joined to the
        crossing through the trajectory shared by both waterfalls
    c   the landing of ``B`` on the ``-n_A`` side of ``A``
    d   the landing of ``B`` on the other side

Wings: ``T`` is the waterfall, ``N`` the ground on the ``-n`` side of the
landing curve and ``O`` the ground on the ``+n`` side, where ``n`` is the
outward normal at the fold.
"""

import heapq
from collections import Counter
from dataclasses import dataclass, field, replace

import numpy as np

from .diagrams import Curve, FoldDiagram
from .errors import InvalidSpine, ProjectionMiss
from .spine import Cell, Edge, MarkedSpine, Vertex, resolve_T, trace_circuits
from .tangle import EXCLUSION_REL, plane_frame

# rays start this many mean edge lengths inside the solid
INWARD_STEP = 0.1
# label runs along a fold shorter than this many segments are mesh noise
MIN_RUN = 3

ROLE_SLOT = {"a": 0, "b": 1, "c": 2, "d": 3}


# -- events along folds -------------------------------------------------------

@dataclass(frozen=True)
class FoldEvent:
    """ A cusp or crossing occurrence at position ``pos`` along a loop.

    ``pos`` is ``segment + fraction``; a cusp at fold point ``i`` sits at
    ``pos = i``.
    """

    pos: float
    kind: str      # "cusp", "over" or "under"
    ref: int       # cusp or crossing index


def fold_events(folds, cusps, tangle):
    """ Events of every loop, sorted along the loop. """
    out = [[] for _ in folds]
    for ci, c in enumerate(cusps):
        out[c.loop].append(FoldEvent(float(c.index), "cusp", ci))
    for xi, t in enumerate(tangle.trajectories):
        lu, su, fu = t.upper
        ll, sl, fl = t.lower
        out[lu].append(FoldEvent(su + fu, "over", xi))
        out[ll].append(FoldEvent(sl + fl, "under", xi))
    for ev in out:
        ev.sort(key=lambda e: (e.pos, e.kind != "cusp"))
    return out


def _runs(plus):
    """ Cyclic runs ``[start, length, label]`` of a label sequence. """
    n = len(plus)
    starts = [i for i in range(n) if plus[i] != plus[i - 1]]
    out = []
    for k, a in enumerate(starts):
        b = starts[(k + 1) % len(starts)]
        out.append([a, (b - a) % n or n, bool(plus[a])])
    return out


def settle_labels(strat, min_run=MIN_RUN):
    """ Copy of ``strat`` whose fold labels have no runs shorter than
    ``min_run`` segments.

    The shortest run is absorbed into its neighbours until none is left
    (or the loop carries a single label).  Surviving cusps are a subset of
    the original ones.
    """
    folds = []
    for loop in strat.folds:
        plus = loop.plus.copy()
        n = len(plus)
        while True:
            runs = _runs(plus)
            if len(runs) < 2:
                break
            a, length, label = min(runs, key=lambda r: (r[1], r[0]))
            if length >= min_run:
                break
            for j in range(a, a + length):
                plus[j % n] = not label
        folds.append(replace(loop, plus=plus))
    cusps = []
    for c in strat.cusps:
        plus = folds[c.loop].plus
        if plus[c.index % len(plus)] != plus[(c.index - 1) % len(plus)]:
            cusps.append(c)
    return replace(strat, folds=folds, cusps=cusps)


class _Caster:
    """ First-hit queries along ``-v`` from fold points.

    A ray starts a small step inside the solid (against the outward normal
    at the fold) so that faces touching the fold point are not hit.  Faces
    are bucketed on a grid in the plane orthogonal to ``v``.
    """

    def __init__(self, strat):
        mesh = strat.mesh
        self.mesh = mesh
        self.v = strat.direction
        self.step = INWARD_STEP * mesh.mean_edge_length
        self.tiny = EXCLUSION_REL * mesh.diagonal
        self.normals = mesh.face_normals
        self.ground = (strat.labeling.g < 0)[mesh.faces].any(axis=1)
        e1, e2 = plane_frame(self.v)
        self.P = np.stack([e1, e2], axis=1)
        tri = mesh.vertices[mesh.faces]
        self.p0 = tri[:, 0]
        self.e1 = tri[:, 1] - tri[:, 0]
        self.e2 = tri[:, 2] - tri[:, 0]
        t2 = tri @ self.P
        lo, hi = t2.min(axis=1), t2.max(axis=1)
        self.cell = 2.0 * mesh.mean_edge_length
        self.origin = lo.min(axis=0)
        ilo = np.floor((lo - self.origin) / self.cell).astype(int)
        ihi = np.floor((hi - self.origin) / self.cell).astype(int)
        grid = {}
        for f in range(len(tri)):
            for a in range(ilo[f, 0], ihi[f, 0] + 1):
                for b in range(ilo[f, 1], ihi[f, 1] + 1):
                    grid.setdefault((a, b), []).append(f)
        self.grid = {k: np.array(v, dtype=np.int64) for k, v in grid.items()}
        self._nodes = {}

    def offset(self, loop, i, s):
        """ Outward normal along the fold, continuous across segments. """
        key = id(loop)
        nodes = self._nodes.get(key)
        if nodes is None:
            fn = self.normals[loop.faces]
            nodes = fn + np.roll(fn, 1, axis=0)
            nodes /= np.linalg.norm(nodes, axis=1)[:, None]
            self._nodes[key] = (loop, nodes)
        else:
            nodes = nodes[1]
        n = len(nodes)
        return (1 - s) * nodes[i % n] + s * nodes[(i + 1) % n]

    def cast(self, p):
        """ ``(lam, face)`` of the first hit of ``p - lam v``, ``lam > 0``. """
        key = tuple(np.floor((p @ self.P - self.origin) / self.cell).astype(int))
        cand = self.grid.get(key)
        if cand is None:
            return None
        d = -self.v
        e1, e2 = self.e1[cand], self.e2[cand]
        h = np.cross(d, e2)
        det = np.einsum("ij,ij->i", e1, h)
        ok = np.abs(det) > 1e-300
        inv = np.where(ok, 1.0 / np.where(ok, det, 1.0), 0.0)
        s = p - self.p0[cand]
        u = np.einsum("ij,ij->i", s, h) * inv
        q = np.cross(s, e1)
        w = (q @ d) * inv
        lam = np.einsum("ij,ij->i", e2, q) * inv
        hit = ok & (u >= 0) & (w >= 0) & (u + w <= 1) & (lam > self.tiny)
        if not np.any(hit):
            return None
        k = int(np.argmin(np.where(hit, lam, np.inf)))
        return float(lam[k]), int(cand[k])

    def land(self, loop, i, s):
        """ ``(point, face)`` where fold point ``(i, s)`` of ``loop`` lands,
        or ``None`` if the ray leaves the mesh. """
        i = i % len(loop)
        p = loop.point_at(i, s) - self.step * self.offset(loop, i, s)
        hit = self.cast(p)
        if hit is None:
            return None
        return p - hit[0] * self.v, hit[1]


def check_landing(strat):
    """ Land every PLUS fold segment midpoint; raise on a miss.

    Raises
    ------
    ProjectionMiss
    """
    caster = _Caster(strat)
    for li, loop in enumerate(strat.folds):
        for i in np.nonzero(loop.plus)[0].tolist():
            hit = caster.land(loop, i, 0.5)
            if hit is None or not caster.ground[hit[1]]:
                raise ProjectionMiss("fold point does not land on the PLUS region",
                                     loop=li, segment=i,
                                     point=loop.point_at(i, 0.5).tolist(),
                                     face=None if hit is None else hit[1])


def build_fold_diagram(strat, tangle, check=True):
    """ Fold diagram of a stratification and its double tangents.

    Curves are the fold loops with their events; crossings carry the tangle
    polarities with the upper fold over, and cusps carry both polarities.

    Raises
    ------
    ProjectionMiss
        A PLUS fold point whose downward ray leaves through the MINUS
        region (only with ``check``).
    """
    if check:
        check_landing(strat)
    events = fold_events(strat.folds, strat.cusps, tangle)
    curves = []
    for li, loop in enumerate(strat.folds):
        evs, labs = [], []
        for e in events[li]:
            if e.kind == "cusp":
                evs.append(("c", f"c{e.ref}"))
                labs.append(bool(loop.plus[int(e.pos) % len(loop)]))
            else:
                evs.append(("x", f"x{e.ref}", e.kind == "over"))
                labs.append(True)
        if not evs:
            labs = [bool(loop.plus[0])]
        curves.append(Curve(tuple(evs), tuple(labs)))
    crossings = {f"x{i}": t.polarity for i, t in enumerate(tangle.trajectories)}
    cusps = {f"c{i}": (c.first, c.second) for i, c in enumerate(strat.cusps)}
    return FoldDiagram(tuple(curves), crossings, cusps, strat.report.chi_d1p)


# -- spine ----------------------------------------------------------------------

@dataclass
class _Beam:
    loop: int
    start: float
    end: float          # may exceed the loop length for wrapped beams
    edge: int = -1


@dataclass
class GeometricSpine:
    """ A marked spine together with the data it was drawn from. """

    spine: MarkedSpine
    region_chi: dict
    chi_plus: int
    cuts: int
    conflicts: list = field(default_factory=list)

    @property
    def chi_regions(self):
        return sum(self.region_chi.values())

    @property
    def consistent(self):
        """ Whether the T-resolution is orientable with the Euler
        characteristic of the PLUS region, as it must be.  Coarse meshes can
        break the landing curves and fail this check. """
        r = resolve_T(self.spine)
        return r.orientable and r.chi == self.chi_plus

    def as_dict(self):
        return {"regions": len(self.region_chi), "chi_regions": self.chi_regions,
                "chi_plus": self.chi_plus, "cuts": self.cuts,
                "conflicts": list(self.conflicts), "consistent": self.consistent}


def _in_interval(pos, start, end, n):
    if end <= n:
        return start <= pos <= end
    return pos >= start or pos <= end - n


def _spine_graph(strat, tangle, events):
    """ Vertices, edges and free arcs of the landing graph plus beam data. """
    folds, cusps = strat.folds, strat.cusps
    v = strat.direction
    caster = _Caster(strat)
    e1, e2 = plane_frame(v)
    P = np.stack([e1, e2], axis=1)
    normals = strat.mesh.face_normals

    vertices = [Vertex("Q", (0, 1, 2, 3)) for _ in tangle.trajectories]
    cusp_vertex = {}
    for ci, c in enumerate(cusps):
        cusp_vertex[ci] = len(vertices)
        vertices.append(Vertex("rim" if c.first > 0 else "interior"))

    # slots at each occurrence: (slot before, slot after)
    occ_slots = {}
    for xi, t in enumerate(tangle.trajectories):
        lu, su, fu = t.upper
        ll, sl, fl = t.lower
        A, B = folds[lu], folds[ll]
        heights = []
        for s in (0.5 * fu, 0.5 * (1 + fu)):
            hit = caster.land(A, su, s)
            heights.append(-np.inf if hit is None else float(np.dot(hit[0], v)))
        # the near side lands higher, next to the lower fold
        occ_slots[("over", xi)] = (1, 0) if heights[0] > heights[1] else (0, 1)
        n_a = normals[A.faces[su]] @ P
        t_b = (B.points[(sl + 1) % len(B)] - B.points[sl]) @ P
        occ_slots[("under", xi)] = (3, 2) if np.dot(t_b, n_a) < 0 else (2, 3)

    edges, beams, free_arcs = [], [], []
    for li, loop in enumerate(folds):
        n = len(loop)
        evs = events[li]
        cus = [e for e in evs if e.kind == "cusp"]
        if not loop.plus.any():
            free_arcs.append(None)
            continue
        if not cus:
            occ = [e for e in evs if e.kind != "cusp"]
            if not occ:
                beams.append(_Beam(li, 0.0, float(n), len(edges)))
                edges.append(Edge(None))
                continue
            for k, e in enumerate(occ):
                nxt = occ[(k + 1) % len(occ)]
                end = nxt.pos if k + 1 < len(occ) else nxt.pos + n
                a = (e.ref, occ_slots[(e.kind, e.ref)][1])
                b = (nxt.ref, occ_slots[(nxt.kind, nxt.ref)][0])
                beams.append(_Beam(li, e.pos, end, len(edges)))
                edges.append(Edge((a, b)))
            continue
        # rotate so the events start at a cusp
        k0 = evs.index(cus[0])
        ring = evs[k0:] + evs[:k0]
        m = len(ring)
        for k, e in enumerate(ring):
            if e.kind != "cusp":
                continue
            nxt_c = next(j for j in range(1, m + 1) if ring[(k + j) % m].kind == "cusp")
            start = e.pos
            plus_after = bool(loop.plus[int(e.pos) % n])
            if not plus_after:
                stop = ring[(k + nxt_c) % m]
                free_arcs.append((cusp_vertex[e.ref], cusp_vertex[stop.ref]))
                continue
            path = [ring[(k + j) % m] for j in range(0, nxt_c + 1)]
            for j in range(len(path) - 1):
                x, y = path[j], path[j + 1]
                a = ((cusp_vertex[x.ref], 0) if x.kind == "cusp"
                     else (x.ref, occ_slots[(x.kind, x.ref)][1]))
                b = ((cusp_vertex[y.ref], 0) if y.kind == "cusp"
                     else (y.ref, occ_slots[(y.kind, y.ref)][0]))
                s, t = x.pos, y.pos
                if t <= s:
                    t += n
                beams.append(_Beam(li, s, t, len(edges)))
                edges.append(Edge((a, b)))
            del start
    return vertices, edges, free_arcs, beams


def _crossings_2d(p, q, a, b):
    """ Fractions along ``p -> q`` where it properly crosses the segments
    ``a -> b`` (vectorised over ``a, b``). """
    d1 = q - p
    d2 = b - a
    den = d1[0] * d2[:, 1] - d1[1] * d2[:, 0]
    r = a - p
    with np.errstate(divide="ignore", invalid="ignore"):
        s = (r[:, 0] * d2[:, 1] - r[:, 1] * d2[:, 0]) / den
        t = (r[:, 0] * d1[1] - r[:, 1] * d1[0]) / den
    ok = (den != 0) & (s >= 0) & (s < 1) & (t > 0) & (t < 1)
    return ok, s


class _UnionFind:
    def __init__(self, items):
        self.parent = {x: x for x in items}

    def find(self, x):
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[ra] = rb


def _edge_key(mesh, f, g):
    """ The mesh edge shared by faces ``f`` and ``g`` or ``None``. """
    common = set(mesh.faces[f].tolist()) & set(mesh.faces[g].tolist())
    if len(common) != 2:
        return None
    a, b = sorted(common)
    return a, b


def _landing_walk(strat, caster, loop_index, lo, hi, max_depth=40):
    """ Mesh edges crossed by the landing curve of fold positions
    ``lo .. hi`` (no jump inside), with the landing point of each crossing.

    The position interval is bisected until consecutive landing faces are
    equal or share an edge.  Returns ``(crossings, gaps)``.
    """
    loop = strat.folds[loop_index]
    mesh = strat.mesh

    def land(pos):
        i = int(np.floor(pos))
        return caster.land(loop, i, pos - i)
    out, gaps = [], 0
    # seed with one piece per segment so closed runs are not skipped
    knots = [lo] + list(range(int(np.floor(lo)) + 1, int(np.ceil(hi)))) + [hi]
    hits = [land(x) for x in knots]
    stack = [(knots[k], hits[k], knots[k + 1], hits[k + 1], 0)
             for k in range(len(knots) - 2, -1, -1)]
    while stack:
        a, la, b, lb, depth = stack.pop()
        if la is None or lb is None:
            gaps += 1
            continue
        if la[1] == lb[1]:
            continue
        key = _edge_key(mesh, la[1], lb[1])
        if key is not None:
            out.append((key, 0.5 * (a + b), 0.5 * (la[0] + lb[0])))
            continue
        if depth >= max_depth:
            gaps += 1
            continue
        m = 0.5 * (a + b)
        lm = land(m)
        stack.append((m, lm, b, lb, depth + 1))
        stack.append((a, la, m, lm, depth + 1))
    return out, gaps


def _walk_intervals(strat, events):
    """ Position intervals along which landing curves are continuous.

    PLUS runs are split where the loop passes over another fold, since
    the landing jumps there.
    """
    eps = 1e-9
    out = []
    for li, loop in enumerate(strat.folds):
        n = len(loop)
        if not loop.plus.any():
            continue
        evs = events[li]
        cuts = [e.pos for e in evs if e.kind in ("cusp", "over")]
        if not cuts:
            out.append((li, 0.0, float(n)))
            continue
        cuts.sort()
        for k, a in enumerate(cuts):
            b = cuts[(k + 1) % len(cuts)]
            if b <= a:
                b += n
            if not loop.plus[int(np.floor(a + 0.5 * (b - a))) % n]:
                continue
            out.append((li, a + eps, b - eps))
    return out


def _rim_completion(strat, caster, cusp):
    """ Ground edges crossed by the landing curve between the landing of a
    rim cusp and the cusp itself.

    On a smooth surface the landing point slides up to the cusp; on a
    mesh it stops a finite distance below.  The gap is closed by the
    shortest face path from the landing face to the fold faces at the cusp.
    """
    mesh = strat.mesh
    loop = strat.folds[cusp.loop]
    n = len(loop)
    i = cusp.index
    eps = 1e-9
    if loop.plus[(i - 1) % n]:
        hit = caster.land(loop, (i - 1) % n, 1.0 - eps)
    else:
        hit = caster.land(loop, i, eps)
    if hit is None:
        return []
    start = hit[1]
    targets = {int(loop.faces[(i - 1) % n]), int(loop.faces[i % n])}
    bary = mesh.barycenters
    nbr = mesh.face_neighbors
    ground = caster.ground
    dist = {start: 0.0}
    prev = {}
    heap = [(0.0, start)]
    end = None
    while heap:
        d, f = heapq.heappop(heap)
        if f in targets:
            end = f
            break
        if d > dist[f]:
            continue
        for g in nbr[f].tolist():
            if g < 0 or not (ground[g] or g in targets):
                continue
            nd = d + float(np.linalg.norm(bary[g] - bary[f]))
            if nd < dist.get(g, np.inf):
                dist[g] = nd
                prev[g] = f
                heapq.heappush(heap, (nd, g))
    if end is None:
        return []
    out = []
    while end != start:
        f = prev[end]
        out.append(_edge_key(mesh, f, end))
        end = f
    return out


def _cut_ground(strat, beams_at, caster, events):
    """ Cut the negative-vertex complex along the landing curves.

    Returns the cut edges, the wing tallies and the number of unresolved
    gaps in the landing curves.
    """
    mesh = strat.mesh
    neg = strat.labeling.g < 0
    normals = mesh.face_normals
    X = mesh.vertices
    cut, votes, gaps = set(), {}, 0
    for li, lo, hi in _walk_intervals(strat, events):
        loop = strat.folds[li]
        n = len(loop)
        crossings, g = _landing_walk(strat, caster, li, lo, hi)
        gaps += g
        for (a, b), pos, point in crossings:
            if not (neg[a] and neg[b]):
                continue
            cut.add((a, b))
            wing = beams_at(li, pos % n)
            if wing is None:
                continue
            n_a = normals[loop.faces[int(np.floor(pos)) % n]]
            na, oa = (a, b) if np.dot(X[a] - point, n_a) < np.dot(X[b] - point, n_a) else (b, a)
            votes.setdefault((wing, "N"), Counter())[na] += 1
            votes.setdefault((wing, "O"), Counter())[oa] += 1
    for cusp in strat.cusps:
        if cusp.first > 0:
            cut.update(k for k in _rim_completion(strat, caster, cusp)
                       if neg[k[0]] and neg[k[1]])
    return cut, votes, gaps


def _regions(mesh, neg, cut):
    """ Components of the negative-vertex complex minus the cut edges and
    the Euler characteristic of each. """
    verts = np.nonzero(neg)[0].tolist()
    uf = _UnionFind(verts)
    edges = [k for k in mesh.edge_faces if neg[k[0]] and neg[k[1]] and k not in cut]
    for a, b in edges:
        uf.union(a, b)
    region = {x: uf.find(x) for x in verts}
    chi = Counter()
    for x in verts:
        chi[region[x]] += 1
    for a, b in edges:
        chi[region[a]] -= 1
    for tri in mesh.faces.tolist():
        if not all(neg[x] for x in tri):
            continue
        ks = [(tri[k], tri[(k + 1) % 3]) for k in range(3)]
        if any((min(e), max(e)) in cut for e in ks):
            continue
        chi[region[tri[0]]] += 1
    return region, chi


def _check_tangle(strat, tangle):
    for t in tangle.trajectories:
        for loop, seg, _ in (t.upper, t.lower):
            if not strat.folds[loop].plus[seg]:
                raise InvalidSpine("double tangent on a suppressed fold run",
                                   loop=loop, segment=seg)


def spine_from_geometry(strat, tangle):
    """ The marked spine carried by the fold diagram of ``strat``.

    Returns
    -------
    GeometricSpine

    Raises
    ------
    InvalidSpine
        When a boundary circuit of the landing graph cannot be placed in a
        region of the PLUS surface.
    """
    strat = settle_labels(strat)
    _check_tangle(strat, tangle)
    mesh = strat.mesh
    folds = strat.folds
    events = fold_events(folds, strat.cusps, tangle)
    vertices, edges, free_arcs, beams = _spine_graph(strat, tangle, events)
    caster = _Caster(strat)
    neg = strat.labeling.g < 0

    beam_of = {}
    for bm in beams:
        beam_of.setdefault(bm.loop, []).append(bm)

    def beams_at(loop, pos):
        n = len(folds[loop])
        for bm in beam_of.get(loop, []):
            if _in_interval(pos, bm.start, bm.end, n):
                return bm.edge
        return None

    cut, votes, gaps = _cut_ground(strat, beams_at, caster, events)
    region, chi = _regions(mesh, neg, cut)

    def fold_votes(faces):
        out = Counter()
        for fi in faces:
            for x in mesh.faces[int(fi)].tolist():
                if neg[x]:
                    out[x] += 1
        return out

    # waterfalls hang from the PLUS fold segments of their beam
    for li, loop in enumerate(folds):
        for i in np.nonzero(loop.plus)[0].tolist():
            e = beams_at(li, i + 0.5)
            if e is not None:
                votes.setdefault((e, "T"), Counter()).update(fold_votes([loop.faces[i]]))
    # free arcs: MINUS runs between cusps or whole MINUS loops, in the
    # order _spine_graph created them
    arc_votes = []
    for li, loop in enumerate(folds):
        n = len(loop)
        if not loop.plus.any():
            arc_votes.append(fold_votes(loop.faces))
            continue
        if loop.plus.all():
            continue
        cus = [e for e in events[li] if e.kind == "cusp"]
        for k, e in enumerate(cus):
            if loop.plus[int(e.pos) % n]:
                continue
            s, t = int(e.pos), int(cus[(k + 1) % len(cus)].pos)
            if t <= s:
                t += n
            arc_votes.append(fold_votes(loop.faces[j % n] for j in range(s, t)))

    spine0 = MarkedSpine(tuple(vertices), tuple(edges), tuple(free_arcs), None)
    circuits, _ = trace_circuits(spine0)

    conflicts = []
    by_region = {}
    for ci, circ in enumerate(circuits):
        tally = Counter()
        for side in circ:
            c = votes.get((side[1], side[2])) if side[0] == "e" else arc_votes[side[1]]
            for x, cnt in (c or {}).items():
                tally[region[x]] += cnt
        if not tally:
            raise InvalidSpine("boundary circuit without a region", circuit=ci)
        ranked = tally.most_common()
        if len(ranked) > 1:
            conflicts.append({"circuit": ci, "regions": [int(r) for r, _ in ranked]})
        by_region.setdefault(ranked[0][0], []).append(circ)

    cells = []
    for r in sorted(by_region):
        circs = []
        for c in by_region[r]:
            oc, consistent = _orient_circuit(c)
            if not consistent:
                conflicts.append({"unoriented_circuit": len(circs)})
            circs.append(oc)
        cells.append(Cell(tuple(circs), int(chi[r]), 1))
    for r in sorted(set(chi) - set(by_region)):
        conflicts.append({"region_without_circuit": int(r), "chi": int(chi[r])})
    spine = spine0.with_cells(cells)
    if gaps:
        conflicts.append({"landing_gaps": gaps})
    return GeometricSpine(spine, {int(r): int(chi[r]) for r in chi},
                          strat.report.chi_d1p, len(cut), conflicts)


# wing directions relative to the loop orientation, see the module notes
_WING_SIGN = {"T": 1, "N": -1, "O": 1}


def _orient_circuit(circ):
    """ List ``circ`` in the direction induced by the outward normal.

    Returns the circuit and whether all its sides agree on that direction.
    """
    signs = []
    for side in circ:
        if side[0] == "e":
            signs.append(_WING_SIGN[side[2]] * side[3])
        else:
            signs.append(side[2])
    consistent = len(set(signs)) == 1
    if sum(signs) < 0:
        return tuple(s[:-1] + (-s[-1],) for s in reversed(circ)), consistent
    return tuple(circ), consistent
