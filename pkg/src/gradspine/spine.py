"""Marked spines: 4-valent singular graphs with marked beams and 2-cells.

Vertices
    ``Q`` vertices have four slots ``0..3``.  Each slot is the end of a
    beam (a triple edge) with three wings labelled ``T``, ``N`` and ``O``.
    The marking at a ``Q`` vertex is a permutation ``pattern`` assigning
    the roles ``a, b, c, d`` to slots; the wing of role ``r`` labelled
    ``L`` is the page towards role ``PARTNER[r][L]``.  Only even
    permutations are admissible.

    ``interior`` and ``rim`` vertices are free ends of a triple edge.  At
    an interior end the ``N`` and ``O`` wings join and the ``T`` wing runs
    into a free boundary arc; at a rim end ``T`` and ``N`` join and ``O``
    runs into a free arc.

Edges
    ``ends`` is ``((v, slot), (w, slot))`` or ``None`` for a triple circle.
    ``gluing`` names, for the wings ``T, N, O`` at the first end, the wing
    they continue into at the second end; continuity requires ``"TNO"``.

Cells
    Surfaces attached along boundary circuits.  A circuit is a cyclic tuple
    of sides ``("e", edge, label, dir)`` (the wing ``label``, named at the
    first end of ``edge``, run forwards for ``dir = 1``) or
    ``("f", arc, dir)`` for a free boundary arc.  ``chi`` is the Euler
    characteristic of the cell and ``orientation`` is ``+1`` when it
    induces the listed direction on its circuits.
"""

import itertools
import json
from dataclasses import dataclass, replace

from .errors import (InvalidPattern, InvalidSpine, MarkerDiscontinuity, NotADiskCell,
                     ParseError)

LABELS = ("T", "N", "O")
ROLE_NAMES = "abcd"
PARTNER = (
    {"T": 1, "N": 2, "O": 3},
    {"T": 0, "N": 2, "O": 3},
    {"T": 1, "N": 0, "O": 3},
    {"T": 1, "N": 0, "O": 2},
)
TOWARD = tuple({p: lab for lab, p in PARTNER[r].items()} for r in range(4))
END_JOIN = {"interior": ("N", "O"), "rim": ("T", "N")}
END_FREE = {"interior": "T", "rim": "O"}
VERTEX_KINDS = ("Q", "interior", "rim")


def _parity(perm):
    perm = list(perm)
    sign = 1
    for i in range(len(perm)):
        while perm[i] != i:
            j = perm[i]
            perm[i], perm[j] = perm[j], perm[i]
            sign = -sign
    return sign


ADMISSIBLE = tuple(p for p in itertools.permutations(range(4)) if _parity(p) == 1)


def marking_of(pattern):
    """ Raw marking ``{slot: {label: partner slot}}`` of a pattern. """
    inv = {s: r for r, s in enumerate(pattern)}
    return {s: {lab: pattern[PARTNER[inv[s]][lab]] for lab in LABELS} for s in range(4)}


def pattern_from_marking(marking):
    """ The admissible pattern realising a raw marking.

    Raises
    ------
    InvalidPattern
        When no admissible pattern produces the marking.
    """
    norm = {int(s): {lab: int(t) for lab, t in m.items()} for s, m in dict(marking).items()}
    for p in ADMISSIBLE:
        if marking_of(p) == norm:
            return p
    raise InvalidPattern("marking does not match an admissible pattern")


def pattern_from_edges(alpha, beta):
    """ Pattern from the doubly T-marked link edge ``alpha`` and the doubly
    N-marked link edge ``beta``.

    Raises
    ------
    InvalidPattern
        If the edges do not share exactly one slot, or the induced
        permutation has the wrong handedness.
    """
    alpha, beta = set(alpha), set(beta)
    common = alpha & beta
    if len(alpha) != 2 or len(beta) != 2 or len(common) != 1:
        raise InvalidPattern("T edge and N edge must share exactly one link vertex")
    a = common.pop()
    b = (alpha - {a}).pop()
    c = (beta - {a}).pop()
    d = ({0, 1, 2, 3} - {a, b, c}).pop()
    p = (a, b, c, d)
    if p not in ADMISSIBLE:
        raise InvalidPattern("marker pattern has the wrong handedness", pattern=list(p))
    return p


def all_raw_markings():
    """ All ``(3!)^4`` assignments of ``T, N, O`` to the wings of four beams.

    Slot ``s`` has wings towards the other three slots; a raw marking picks
    a bijection from labels to those wings for every slot.
    """
    per_slot = []
    for s in range(4):
        others = [t for t in range(4) if t != s]
        per_slot.append([dict(zip(LABELS, perm)) for perm in itertools.permutations(others)])
    for combo in itertools.product(*per_slot):
        yield {s: combo[s] for s in range(4)}


def is_admissible_marking(marking):
    try:
        pattern_from_marking(marking)
        return True
    except InvalidPattern:
        return False


# -- data ------------------------------------------------------------------

@dataclass(frozen=True)
class Vertex:
    kind: str
    pattern: tuple = None

    @property
    def slots(self):
        return 4 if self.kind == "Q" else 1


@dataclass(frozen=True)
class Edge:
    ends: tuple
    gluing: str = "TNO"

    def glue(self, label):
        return self.gluing[LABELS.index(label)]

    def unglue(self, label):
        return LABELS[self.gluing.index(label)]


@dataclass(frozen=True)
class Cell:
    circuits: tuple
    chi: int = 1
    orientation: int = 1

    @property
    def is_disk(self):
        return self.chi == 1 and len(self.circuits) == 1


@dataclass(frozen=True, eq=False)
class MarkedSpine:
    vertices: tuple
    edges: tuple
    free_arcs: tuple = ()
    cells: tuple = None

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "edges", tuple(self.edges))
        object.__setattr__(self, "free_arcs", tuple(self.free_arcs))
        if self.cells is not None:
            object.__setattr__(self, "cells", tuple(self.cells))

    def with_cells(self, cells):
        return replace(self, cells=tuple(cells))


# -- structure checks -------------------------------------------------------

def _slot_table(spine):
    """ ``{(v, slot): (edge, end)}``; raises on malformed graphs. """
    table = {}
    for ei, e in enumerate(spine.edges):
        if e.ends is None:
            continue
        if len(e.ends) != 2:
            raise InvalidSpine("edge needs two ends", edge=ei)
        for k, (v, s) in enumerate(e.ends):
            if not (0 <= v < len(spine.vertices)):
                raise InvalidSpine("edge end on unknown vertex", edge=ei)
            if not (0 <= s < spine.vertices[v].slots):
                raise InvalidSpine("edge end on unknown slot", edge=ei)
            if (v, s) in table:
                raise InvalidSpine("slot used twice", vertex=v, slot=s)
            table[(v, s)] = (ei, k)
    for vi, v in enumerate(spine.vertices):
        if v.kind not in VERTEX_KINDS:
            raise InvalidSpine(f"unknown vertex kind {v.kind!r}", vertex=vi)
        for s in range(v.slots):
            if (vi, s) not in table:
                raise InvalidSpine("vertex of wrong degree", vertex=vi)
    return table


def _free_arc_table(spine):
    ends = [vi for vi, v in enumerate(spine.vertices) if v.kind != "Q"]
    table = {}
    for ai, arc in enumerate(spine.free_arcs):
        if arc is None:
            continue
        for k, v in enumerate(arc):
            if v in table or v not in ends:
                raise InvalidSpine("free arc must join two distinct free ends", arc=ai)
            table[v] = (ai, k)
    if set(table) != set(ends):
        raise InvalidSpine("every free end needs a free boundary arc")
    return table


@dataclass(frozen=True)
class Verdict:
    ok: bool
    diagnostics: tuple = ()

    def as_dict(self):
        return {"ok": self.ok, "diagnostics": list(self.diagnostics)}


def validate_markers(spine, strict=True):
    """ Check every vertex pattern and marker continuity along every edge.

    Returns a :class:`Verdict`; with ``strict`` the first problem is raised
    instead.

    Raises
    ------
    InvalidPattern, MarkerDiscontinuity, InvalidSpine
    """
    diags = []

    def fail(exc):
        if strict:
            raise exc
        diags.append(exc.to_dict())

    _slot_table(spine)
    for vi, v in enumerate(spine.vertices):
        if v.kind == "Q":
            if v.pattern is None or tuple(v.pattern) not in ADMISSIBLE:
                fail(InvalidPattern("inadmissible marker pattern", vertex=vi,
                                    pattern=list(v.pattern or ())))
        elif v.pattern is not None:
            fail(InvalidSpine("free ends carry no pattern", vertex=vi))
    for ei, e in enumerate(spine.edges):
        if sorted(e.gluing) != sorted("TNO"):
            fail(InvalidSpine("gluing must be a permutation of TNO", edge=ei))
        elif e.gluing != "TNO":
            fail(MarkerDiscontinuity("markers do not continue along the edge", edge=ei,
                                     gluing=e.gluing))
    return Verdict(not diags, tuple(diags))


# -- circuits ----------------------------------------------------------------

@dataclass(frozen=True)
class Corner:
    """ A page passing a vertex from one wing to another.

    ``a`` and ``b`` are ``(slot, label)`` pairs or ``None`` for a free
    boundary arc.
    """

    vertex: int
    a: tuple
    b: tuple


def _leave(spine, table, v, s, lab):
    """ State for leaving vertex ``v`` at slot ``s`` on wing ``lab``. """
    ei, k = table[(v, s)]
    e = spine.edges[ei]
    if k == 0:
        return ei, lab, 1
    return ei, e.unglue(lab), -1


def trace_circuits(spine):
    """ Boundary circuits of the beam neighbourhood.

    Returns ``(circuits, corners)`` where ``corners[i]`` lists the vertex
    corners passed by circuit ``i``.
    """
    validate_markers(spine)
    table = _slot_table(spine)
    arcs = _free_arc_table(spine)
    visited = set()
    circuits, corners = [], []

    strips = [(ei, lab) for ei in range(len(spine.edges)) for lab in LABELS]
    for ei0, lab0 in strips:
        if (ei0, lab0) in visited:
            continue
        state = (ei0, lab0, 1)
        sides, cs = [], []
        seen = set()
        while state not in seen:
            seen.add(state)
            ei, lab, d = state
            visited.add((ei, lab))
            sides.append(("e", ei, lab, d))
            e = spine.edges[ei]
            if e.ends is None:
                # a triple circle: the wing continues through the gluing
                nxt = e.glue(lab) if d > 0 else e.unglue(lab)
                state = (ei, nxt, d)
                continue
            v, s = e.ends[1] if d > 0 else e.ends[0]
            at = e.glue(lab) if d > 0 else lab
            vx = spine.vertices[v]
            if vx.kind == "Q":
                inv = {sl: r for r, sl in enumerate(vx.pattern)}
                r = inv[s]
                r2 = PARTNER[r][at]
                s2 = vx.pattern[r2]
                lab2 = TOWARD[r2][r]
                cs.append(Corner(v, (s, at), (s2, lab2)))
                state = _leave(spine, table, v, s2, lab2)
                continue
            joined = END_JOIN[vx.kind]
            if at in joined:
                other = joined[1] if at == joined[0] else joined[0]
                cs.append(Corner(v, (s, at), (s, other)))
                state = _leave(spine, table, v, s, other)
                continue
            # free wing: run along the free arc to the other free end
            ai, k = arcs[v]
            w = spine.free_arcs[ai][1 - k]
            sides.append(("f", ai, 1 if k == 0 else -1))
            cs.append(Corner(v, (s, at), None))
            wl = END_FREE[spine.vertices[w].kind]
            cs.append(Corner(w, None, (0, wl)))
            state = _leave(spine, table, w, 0, wl)
        circuits.append(tuple(sides))
        corners.append(tuple(cs))
    for ai, arc in enumerate(spine.free_arcs):
        if arc is None:
            circuits.append((("f", ai, 1),))
            corners.append(())
    return circuits, corners


def _reverse_circuit(circ):
    out = []
    for side in reversed(circ):
        out.append(side[:-1] + (-side[-1],))
    return tuple(out)


def _rot_min(seq):
    if not seq:
        return tuple(seq)
    return min(tuple(seq[i:] + seq[:i]) for i in range(len(seq)))


def circuit_key(circ):
    """ Key of an unoriented circuit, invariant under rotation. """
    circ = tuple(circ)
    return min(_rot_min(circ), _rot_min(_reverse_circuit(circ)))


def derive_cells(spine):
    """ Cap every traced circuit with a disk. """
    circuits, _ = trace_circuits(spine)
    return tuple(Cell((c,), 1, 1) for c in circuits)


@dataclass(frozen=True)
class _Layout:
    """ Where every wing and corner lives. """

    strip_cell: dict      # (edge, label) -> (cell, dir)
    corner_cell: list     # per vertex: [(Corner, cell)]
    arc_cell: dict        # arc -> cell


def _layout(spine):
    cells = spine.cells if spine.cells is not None else derive_cells(spine)
    circuits, corners = trace_circuits(spine)
    key_of = {}
    for ci, cell in enumerate(cells):
        for k, circ in enumerate(cell.circuits):
            key = circuit_key(circ)
            if key in key_of:
                raise InvalidSpine("circuit capped more than once", cell=ci)
            key_of[key] = (ci, k)
    traced = {circuit_key(c): i for i, c in enumerate(circuits)}
    missing = set(traced) - set(key_of)
    extra = set(key_of) - set(traced)
    if missing:
        raise InvalidSpine("boundary circuit without a cell", count=len(missing))
    if extra:
        raise InvalidSpine("cell attached along a non-circuit", count=len(extra))

    strip_cell, arc_cell = {}, {}
    corner_cell = [[] for _ in spine.vertices]
    for ci, cell in enumerate(cells):
        for circ in cell.circuits:
            for side in circ:
                if side[0] == "e":
                    key = (side[1], side[2])
                    if key in strip_cell:
                        raise InvalidSpine("wing used by two sides", edge=side[1], label=side[2])
                    strip_cell[key] = (ci, side[3])
                else:
                    arc_cell[side[1]] = ci
            for cn in corners[traced[circuit_key(circ)]]:
                corner_cell[cn.vertex].append((cn, ci))
    return cells, _Layout(strip_cell, corner_cell, arc_cell)


# -- resolution ---------------------------------------------------------------

class _Parity:
    def __init__(self, n):
        self.parent = list(range(n))
        self.par = [0] * n
        self.ok = True

    def find(self, x):
        if self.parent[x] == x:
            return x, 0
        r, p = self.find(self.parent[x])
        self.parent[x] = r
        self.par[x] ^= p
        return r, self.par[x]

    def union(self, a, b, p):
        """ Impose ``parity(a) xor parity(b) == p``. """
        ra, pa = self.find(a)
        rb, pb = self.find(b)
        if ra == rb:
            if (pa ^ pb) != p:
                self.ok = False
            return
        self.parent[ra] = rb
        self.par[ra] = pa ^ pb ^ p


@dataclass(frozen=True)
class ResolvedComponent:
    chi: int
    orientable: bool
    cells: tuple


@dataclass(frozen=True)
class ResolvedSurface:
    components: tuple
    points: int
    seams: int

    @property
    def chi(self):
        return sum(c.chi for c in self.components)

    @property
    def orientable(self):
        return all(c.orientable for c in self.components)

    def as_dict(self):
        return {"chi": self.chi, "orientable": self.orientable,
                "components": [{"chi": c.chi, "orientable": c.orientable,
                                "cells": list(c.cells)} for c in self.components]}


def resolved_points(spine, layout=None):
    """ Points of the resolution over each vertex, as lists of cells.

    At every beam end the ``T`` wing is cut away from the ``N``/``O``
    pair; the points over a vertex are the components of its link after
    that cut.
    """
    if layout is None:
        _, layout = _layout(spine)
    out = []
    for vi in range(len(spine.vertices)):
        nodes = {}

        def node(x):
            if x is None:
                return ("free", len(nodes))
            s, lab = x
            return (s, "T" if lab == "T" else "NO")
        parent = {}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x
        links = []
        for cn, ci in layout.corner_cell[vi]:
            a, b = node(cn.a), node(cn.b)
            nodes[a] = nodes[b] = True
            for x in (a, b):
                parent.setdefault(x, x)
            links.append((a, b, ci))
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[ra] = rb
        comps = {}
        for a, b, ci in links:
            comps.setdefault(find(a), set()).add(ci)
        out.append([sorted(c) for c in comps.values()])
    return out


def resolve_T(spine):
    """ Cut every ``T`` page off its beam and return the resulting surface.

    Raises
    ------
    InvalidPattern, MarkerDiscontinuity, InvalidSpine
        From validation.
    """
    validate_markers(spine)
    cells, layout = _layout(spine)
    n = len(cells)
    uf = _Parity(n)
    comp = list(range(n))

    def cfind(x):
        while comp[x] != x:
            comp[x] = comp[comp[x]]
            x = comp[x]
        return x

    def cunion(a, b):
        ra, rb = cfind(a), cfind(b)
        if ra != rb:
            comp[ra] = rb

    chi = [c.chi for c in cells]
    extra = [0] * n  # per cell: points and arcs charged to its component
    seams = 0
    for ei, e in enumerate(spine.edges):
        cn, dn = layout.strip_cell[(ei, "N")]
        co, do = layout.strip_cell[(ei, "O")]
        ct, _ = layout.strip_cell[(ei, "T")]
        # the N and O sides of the seam must induce opposite directions
        uf.union(cn, co, 0 if dn * do == -1 else 1)
        cunion(cn, co)
        if e.ends is not None:
            seams += 1
            extra[cn] -= 1
            extra[ct] -= 1
    for ai, arc in enumerate(spine.free_arcs):
        if arc is not None:
            extra[layout.arc_cell[ai]] -= 1
    pts = resolved_points(spine, layout)
    npts = 0
    for vlist in pts:
        for cl in vlist:
            npts += 1
            extra[cl[0]] += 1
            for c in cl[1:]:
                cunion(cl[0], c)

    groups = {}
    for ci in range(n):
        groups.setdefault(cfind(ci), []).append(ci)
    # orientability per component: a contradiction anywhere in the
    # component's parity system
    bad_roots = set()
    uf2 = _Parity(n)
    for ei, e in enumerate(spine.edges):
        cn, dn = layout.strip_cell[(ei, "N")]
        co, do = layout.strip_cell[(ei, "O")]
        before = uf2.ok
        uf2.union(cn, co, 0 if dn * do == -1 else 1)
        if before and not uf2.ok:
            bad_roots.add(cfind(cn))
            uf2.ok = True
    comps = []
    for root, members in sorted(groups.items(), key=lambda kv: min(kv[1])):
        comps.append(ResolvedComponent(sum(chi[c] + extra[c] for c in members),
                                       root not in bad_roots, tuple(members)))
    return ResolvedSurface(tuple(comps), npts, seams)


def complexity(spine):
    return sum(1 for v in spine.vertices if v.kind == "Q")


# -- branching -------------------------------------------------------------

@dataclass(frozen=True)
class BranchingVerdict:
    accepted: bool
    multiplicities: tuple

    def as_dict(self):
        return {"accepted": self.accepted, "multiplicities": list(self.multiplicities)}


def boundary_chain(spine, orientation=None):
    """ Coefficient of every edge in the boundary of the oriented 2-chain. """
    cells, layout = _layout(spine)
    eps = list(orientation) if orientation is not None else [c.orientation for c in cells]
    if len(eps) != len(cells):
        raise InvalidSpine("one orientation sign per cell is required")
    out = []
    for ei in range(len(spine.edges)):
        m = 0
        for lab in LABELS:
            ci, d = layout.strip_cell[(ei, lab)]
            m += eps[ci] * d
        out.append(m)
    return tuple(out)


def check_branching(spine, orientation=None):
    """ Accept iff every edge has multiplicity ``+-1`` in the boundary chain. """
    mult = boundary_chain(spine, orientation)
    return BranchingVerdict(all(abs(m) == 1 for m in mult), mult)


# -- flips -------------------------------------------------------------------

def mushroom_flip(spine, cell):
    """ Reverse the orientation of one disk cell.

    Markers are left as they are: the marker pattern at a vertex is tied
    to the local geometry of the singular set, which the flip does not
    move.

    Raises
    ------
    NotADiskCell
    """
    cells = spine.cells if spine.cells is not None else derive_cells(spine)
    if not (0 <= cell < len(cells)):
        raise NotADiskCell("no such cell", cell=cell)
    c = cells[cell]
    if not c.is_disk:
        raise NotADiskCell("cell is not an open disk", cell=cell, chi=c.chi,
                           circuits=len(c.circuits))
    new = list(cells)
    new[cell] = replace(c, orientation=-c.orientation)
    return spine.with_cells(new)


# -- canonical form -----------------------------------------------------------

def _roles(vx):
    """ Slots in role order. """
    return tuple(vx.pattern) if vx.kind == "Q" else (0,)


def _components(spine, table):
    adj = {vi: set() for vi in range(len(spine.vertices))}
    for e in spine.edges:
        if e.ends is not None:
            (v, _), (w, _) = e.ends
            adj[v].add(w)
            adj[w].add(v)
    for arc in spine.free_arcs:
        if arc is not None:
            adj[arc[0]].add(arc[1])
            adj[arc[1]].add(arc[0])
    seen, comps = set(), []
    for v in range(len(spine.vertices)):
        if v in seen:
            continue
        stack, comp = [v], []
        seen.add(v)
        while stack:
            x = stack.pop()
            comp.append(x)
            for y in adj[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        comps.append(sorted(comp))
    return comps


def _bfs(spine, table, arcs, start, vnum, enum, anum):
    """ Number vertices, edges and arcs of one component from ``start``. """
    code = []
    order = [start]
    vnum[start] = len(vnum)
    i = 0
    while i < len(order):
        u = order[i]
        i += 1
        vx = spine.vertices[u]
        code.append(("V", vnum[u], vx.kind))
        for role, s in enumerate(_roles(vx)):
            ei, k = table[(u, s)]
            e = spine.edges[ei]
            w, t = e.ends[1 - k]
            if w not in vnum:
                vnum[w] = len(vnum)
                order.append(w)
            if ei not in enum:
                enum[ei] = (len(enum), k)
                wrole = _roles(spine.vertices[w]).index(t)
                glue = e.gluing if k == 0 else "".join(e.unglue(x) for x in LABELS)
                code.append(("E", enum[ei][0], vnum[u], role, vnum[w], wrole, glue))
        if vx.kind != "Q":
            ai, k = arcs[u]
            w = spine.free_arcs[ai][1 - k]
            if w not in vnum:
                vnum[w] = len(vnum)
                order.append(w)
            if ai not in anum:
                anum[ai] = (len(anum), k)
                code.append(("A", anum[ai][0], vnum[u], vnum[w]))
    return tuple(code)


def _canon_cells(spine, cells, enum, anum):
    out = []
    for c in cells:
        circs = []
        for circ in c.circuits:
            if c.orientation < 0:
                circ = _reverse_circuit(circ)
            sides = []
            for side in circ:
                if side[0] == "e":
                    ei, lab, d = side[1], side[2], side[3]
                    num, k = enum[ei]
                    if k == 1:
                        lab, d = spine.edges[ei].glue(lab), -d
                    sides.append(("e", num, lab, d))
                else:
                    num, k = anum[side[1]]
                    sides.append(("f", num, side[2] if k == 0 else -side[2]))
            circs.append(_rot_min(tuple(sides)))
        out.append((c.chi, tuple(sorted(circs))))
    return tuple(sorted(out))


def canonical_form(spine):
    """ A code equal for two spines iff they are isomorphic.

    Isomorphisms relabel vertices, edges, arcs and cells and may reverse
    edges; they must respect roles, wing labels and cell orientations.
    """
    validate_markers(spine)
    table = _slot_table(spine)
    arcs = _free_arc_table(spine)
    cells = spine.cells if spine.cells is not None else derive_cells(spine)
    comps = _components(spine, table)

    # per component, the starts that give its minimal code
    info = []
    for comp in comps:
        best, starts = None, []
        for s in comp:
            code = _bfs(spine, table, arcs, s, {}, {}, {})
            if best is None or code < best:
                best, starts = code, [s]
            elif code == best:
                starts.append(s)
        info.append((best, starts))
    info.sort(key=lambda x: x[0])
    circles = sorted(e.gluing for e in spine.edges if e.ends is None)
    free_circles = sum(1 for a in spine.free_arcs if a is None)

    best = None
    groups = [list(g) for _, g in itertools.groupby(info, key=lambda x: x[0])]
    for perm in itertools.product(*[itertools.permutations(g) for g in groups]):
        seq = [x for g in perm for x in g]
        for starts in itertools.product(*[x[1] for x in seq]):
            vnum, enum, anum = {}, {}, {}
            codes = tuple(_bfs(spine, table, arcs, s, vnum, enum, anum) for s in starts)
            # circles and free circles get numbers after everything else
            for ei, e in enumerate(spine.edges):
                if e.ends is None:
                    enum[ei] = (len(enum), 0)
            for ai, a in enumerate(spine.free_arcs):
                if a is None:
                    anum[ai] = (len(anum), 0)
            full = (codes, tuple(circles), free_circles,
                    _canon_cells(spine, cells, enum, anum))
            if best is None or full < best:
                best = full
    return json.dumps(best, separators=(",", ":"))


def is_isomorphic(a, b):
    return canonical_form(a) == canonical_form(b)


# -- export --------------------------------------------------------------------

def to_dot(spine):
    """ Deterministic DOT text for the singular graph. """
    lines = ["graph spine {"]
    for vi, v in enumerate(spine.vertices):
        if v.kind == "Q":
            pat = "".join(str(s) for s in v.pattern)
            lines.append(f'  v{vi} [shape=box, kind=Q, pattern="{pat}"];')
        else:
            lines.append(f'  v{vi} [shape=point, kind={v.kind}];')
    for ei, e in enumerate(spine.edges):
        if e.ends is None:
            lines.append(f'  c{ei} [shape=circle, label="circle", gluing="{e.gluing}"];')
            continue
        (v, s), (w, t) = e.ends
        rs = _role_name(spine.vertices[v], s)
        rt = _role_name(spine.vertices[w], t)
        lines.append(f'  v{v} -- v{w} [id=e{ei}, tail="{rs}", head="{rt}", '
                     f'gluing="{e.gluing}"];')
    for ai, arc in enumerate(spine.free_arcs):
        if arc is not None:
            lines.append(f'  v{arc[0]} -- v{arc[1]} [id=f{ai}, style=dashed];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def _role_name(vx, s):
    if vx.kind != "Q":
        return "end"
    return ROLE_NAMES[list(vx.pattern).index(s)]


def spine_to_dict(spine):
    return {
        "graph": {
            "vertices": [{"kind": v.kind} for v in spine.vertices],
            "edges": [{"ends": None if e.ends is None else [list(x) for x in e.ends],
                       "gluing": e.gluing} for e in spine.edges],
            "free_arcs": [None if a is None else list(a) for a in spine.free_arcs],
        },
        "patterns": [None if v.pattern is None else list(v.pattern) for v in spine.vertices],
        "cells": None if spine.cells is None else [
            {"chi": c.chi, "circuits": [[list(s) for s in circ] for circ in c.circuits]}
            for c in spine.cells],
        "orientations": None if spine.cells is None else [c.orientation for c in spine.cells],
    }


def spine_from_dict(data):
    try:
        g = data["graph"]
        pats = data.get("patterns") or [None] * len(g["vertices"])
        verts = []
        for v, p in zip(g["vertices"], pats):
            kind = v.get("kind", "Q")
            if p is not None and isinstance(p, dict):
                if "alpha" in p:
                    p = pattern_from_edges(p["alpha"], p["beta"])
                else:
                    p = pattern_from_marking(p)
            verts.append(Vertex(kind, None if p is None else tuple(int(x) for x in p)))
        edges = [Edge(None if e.get("ends") is None else tuple(tuple(int(y) for y in x)
                                                             for x in e["ends"]),
                      e.get("gluing", "TNO")) for e in g["edges"]]
        arcs = tuple(None if a is None else (int(a[0]), int(a[1]))
                     for a in g.get("free_arcs", []))
        cells = None
        if data.get("cells") is not None:
            ori = data.get("orientations") or [1] * len(data["cells"])
            cells = tuple(Cell(tuple(tuple(_side(s) for s in circ) for circ in c["circuits"]),
                               int(c.get("chi", 1)), int(o))
                          for c, o in zip(data["cells"], ori))
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise ParseError(f"malformed spine: {exc!r}", line=0) from None
    return MarkedSpine(tuple(verts), tuple(edges), arcs, cells)


def _side(s):
    if s[0] == "e":
        return ("e", int(s[1]), str(s[2]), int(s[3]))
    return ("f", int(s[1]), int(s[2]))


def parse_spine(text):
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", line=exc.lineno) from None
    return spine_from_dict(data)


# -- constructors ---------------------------------------------------------------

def spine_from_matching(n_vertices, matching, patterns=None):
    """ Special spine from a perfect matching of the ``4 n`` slot ends.

    ``matching`` lists pairs ``((v, s), (w, t))``; cells are derived.
    """
    if patterns is None:
        patterns = [ADMISSIBLE[0]] * n_vertices
    verts = tuple(Vertex("Q", tuple(p)) for p in patterns)
    edges = tuple(Edge((tuple(a), tuple(b))) for a, b in matching)
    sp = MarkedSpine(verts, edges, (), None)
    return sp.with_cells(derive_cells(sp))


def closed_surface_spine(chi):
    """ Spine with empty singular set: one closed surface cell. """
    return MarkedSpine((), (), (), (Cell((), int(chi), 1),))
