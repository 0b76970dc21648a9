"""Census of special marked spines of small complexity.

A special spine with ``c`` true vertices has a singular graph that is a
connected 4-regular multigraph on ``c`` vertices (loops and multiple edges
allowed).  Every such graph, carrying every admissible marker pattern at
each vertex, is built and the results are deduplicated by canonical code.
"""

import itertools
from dataclasses import dataclass

from .errors import ScaleExceeded
from .spine import ADMISSIBLE, canonical_form, resolve_T, spine_from_matching

MAX_COMPLEXITY = 4


def _check_scale(c):
    if not isinstance(c, int) or c < 1:
        raise ValueError("complexity must be a positive integer")
    if c > MAX_COMPLEXITY:
        raise ScaleExceeded("census limited to small complexity",
                            c=c, limit=MAX_COMPLEXITY)


def _adjacency_matrices(n):
    """ Symmetric matrices with even diagonal and row sums 4.

    ``m[i][i]`` counts the loop ends at ``i`` (twice the loop count).
    """
    m = [[0] * n for _ in range(n)]
    cells = [(i, j) for i in range(n) for j in range(i, n)]

    def rec(k, load):
        if k == len(cells):
            if all(x == 4 for x in load):
                yield tuple(tuple(r) for r in m)
            return
        i, j = cells[k]
        # once row i is past, it must be full
        if j == i and i > 0 and load[i - 1] != 4:
            return
        room = 4 - load[i] if i == j else min(4 - load[i], 4 - load[j])
        step = 2 if i == j else 1
        for x in range(0, room + 1, step):
            m[i][j] = m[j][i] = x
            load[i] += x
            if i != j:
                load[j] += x
            yield from rec(k + 1, load)
            load[i] -= x
            if i != j:
                load[j] -= x
        m[i][j] = m[j][i] = 0

    yield from rec(0, [0] * n)


def _connected(adj):
    n = len(adj)
    seen, todo = {0}, [0]
    while todo:
        i = todo.pop()
        for j in range(n):
            if adj[i][j] and j not in seen:
                seen.add(j)
                todo.append(j)
    return len(seen) == n


def _canonical_adjacency(adj):
    n = len(adj)
    return min(tuple(tuple(adj[p[i]][p[j]] for j in range(n)) for i in range(n))
               for p in itertools.permutations(range(n)))


def enum_4valent_graphs(c):
    """ Connected 4-regular multigraphs on ``c`` vertices up to isomorphism.

    Each graph is returned as its canonical adjacency matrix, a tuple of
    rows where diagonal entries count loop ends.

    Raises
    ------
    ScaleExceeded
        For ``c`` above the desk-scale limit.
    """
    _check_scale(c)
    found = {_canonical_adjacency(a) for a in _adjacency_matrices(c) if _connected(a)}
    return sorted(found)


def graph_counts(c):
    """ ``(G, Gamma)``: graphs with exactly ``c`` and with at most ``c``
    vertices. """
    _check_scale(c)
    exact = [len(enum_4valent_graphs(k)) for k in range(1, c + 1)]
    return exact[-1], sum(exact)


def matching_of(adj):
    """ A perfect matching of slot ends ``(vertex, slot)`` realizing ``adj``. """
    n = len(adj)
    free = {i: list(range(4)) for i in range(n)}
    out = []
    for i in range(n):
        for _ in range(adj[i][i] // 2):
            out.append(((i, free[i].pop(0)), (i, free[i].pop(0))))
        for j in range(i + 1, n):
            for _ in range(adj[i][j]):
                out.append(((i, free[i].pop(0)), (j, free[j].pop(0))))
    return out


@dataclass(frozen=True)
class CensusRow:
    c: int
    graph: int
    patterns: tuple
    orientable: bool
    code: str

    def as_dict(self):
        return {"c": self.c, "graph": self.graph,
                "patterns": [list(p) for p in self.patterns],
                "orientable": self.orientable, "code": self.code}


def enum_marked_spines(c):
    """ Pairwise non-isomorphic marked special spines with ``c`` vertices.

    Rows are sorted by canonical code, so the output does not depend on the
    enumeration order.
    """
    _check_scale(c)
    rows = {}
    for gi, adj in enumerate(enum_4valent_graphs(c)):
        matching = matching_of(adj)
        for patterns in itertools.product(ADMISSIBLE, repeat=c):
            sp = spine_from_matching(c, matching, list(patterns))
            code = canonical_form(sp)
            if code in rows:
                continue
            rows[code] = CensusRow(c, gi, tuple(patterns),
                                   resolve_T(sp).orientable, code)
    return [rows[k] for k in sorted(rows)]


@dataclass(frozen=True)
class CensusVerdict:
    c: int
    count: int
    graphs: int
    graphs_cumulative: int
    bound: int
    codes_distinct: bool

    @property
    def ok(self):
        return self.codes_distinct and self.count <= self.bound

    def as_dict(self):
        return {"c": self.c, "count": self.count, "graphs": self.graphs,
                "graphs_cumulative": self.graphs_cumulative,
                "bound": self.bound, "codes_distinct": self.codes_distinct,
                "ok": self.ok}


def bound_check(c, rows=None):
    """ Compare the marked spine count with ``Gamma(c) * 12**c``. """
    if rows is None:
        rows = enum_marked_spines(c)
    exact, cumulative = graph_counts(c)
    codes = [r.code for r in rows]
    return CensusVerdict(c, len(rows), exact, cumulative,
                         cumulative * len(ADMISSIBLE) ** c,
                         len(set(codes)) == len(codes))
