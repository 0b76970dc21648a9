"""Combinatorial fold diagrams and their moves.

A diagram is a family of oriented closed curves, each a cyclic sequence of
events.  An event is a crossing occurrence ``("x", id, over)`` or a cusp
``("c", id)``.  Segment ``k`` of a curve runs from event ``k`` to event
``k + 1`` and carries a label, ``True`` for PLUS.  Crossings sit on PLUS
segments only; cusps separate PLUS from MINUS segments.

Every crossing has a polarity ``+1``/``-1`` and one over occurrence (the
strand further along the field).  Every cusp has a first polarity (does
the field point into the PLUS side) and a second polarity (does it agree
with the curve orientation).  Along a curve, cusps where PLUS begins have
equal polarities and cusps where it ends have opposite ones.

All operations return new diagrams; inputs are never modified.
"""

import itertools
import json
from collections import Counter, deque
from dataclasses import dataclass, field

import numpy as np

from .errors import (ForbiddenPair, IncompatibleOrder, InvalidDiagram, NonTerminating,
                     NotConsecutive, ParseError, SiteObstructed)

TOPOLOGY_CHANGING = "TopologyChanging"
TOPOLOGY_PRESERVING = "TopologyPreserving"
FORBIDDEN = "Forbidden"


@dataclass(frozen=True)
class Curve:
    events: tuple
    labels: tuple

    def __post_init__(self):
        object.__setattr__(self, "events", tuple(tuple(e) for e in self.events))
        object.__setattr__(self, "labels", tuple(bool(x) for x in self.labels))

    def __len__(self):
        return len(self.events)

    def label_before(self, k):
        return self.labels[k - 1] if self.events else self.labels[0]

    def has_plus(self):
        return any(self.labels)


@dataclass(frozen=True, eq=False)
class FoldDiagram:
    """ Curves plus crossing polarities and cusp polarities.

    ``chi`` is the Euler characteristic of the PLUS region the curves bound,
    or ``None`` when unknown.
    """

    curves: tuple
    crossings: dict = field(default_factory=dict)
    cusps: dict = field(default_factory=dict)
    chi: object = None

    def __post_init__(self):
        object.__setattr__(self, "curves", tuple(self.curves))
        object.__setattr__(self, "crossings", {k: int(v) for k, v in self.crossings.items()})
        object.__setattr__(self, "cusps", {k: (int(a), int(b)) for k, (a, b) in self.cusps.items()})

    # -- queries ----------------------------------------------------------

    @property
    def n_crossings(self):
        return len(self.crossings)

    @property
    def n_cusps(self):
        return len(self.cusps)

    def occurrences(self, xid):
        """ ``[(curve, position, over), ...]`` for crossing ``xid``. """
        out = []
        for ci, c in enumerate(self.curves):
            for k, e in enumerate(c.events):
                if e[0] == "x" and e[1] == xid:
                    out.append((ci, k, bool(e[2])))
        return out

    def cusp_position(self, cid):
        for ci, c in enumerate(self.curves):
            for k, e in enumerate(c.events):
                if e[0] == "c" and e[1] == cid:
                    return ci, k
        raise InvalidDiagram(f"no cusp {cid!r}")

    def cusp_counts(self):
        """ Counts keyed by flavor ``pp``, ``pm``, ``mp``, ``mm``. """
        out = {"pp": 0, "pm": 0, "mp": 0, "mm": 0}
        for first, second in self.cusps.values():
            out[("p" if first > 0 else "m") + ("p" if second > 0 else "m")] += 1
        return out

    def class_counts(self):
        a = sum(1 for f, s in self.cusps.values() if f == s)
        return a, len(self.cusps) - a

    def _fresh(self, prefix, used):
        i = 0
        while f"{prefix}{i}" in used:
            i += 1
        return f"{prefix}{i}"

    def fresh_crossing_id(self):
        return self._fresh("x", self.crossings)

    def fresh_cusp_id(self):
        return self._fresh("c", self.cusps)

    # -- comparison -------------------------------------------------------

    def _local(self, c, r):
        """ Name-free signature of curve ``c`` read from rotation ``r``. """
        n = len(c)
        out = []
        for k in range(n):
            e = c.events[(k + r) % n]
            if e[0] == "x":
                out.append(("x", bool(e[2]), self.crossings[e[1]], c.labels[(k + r) % n]))
            else:
                out.append(("c",) + self.cusps[e[1]] + (c.labels[(k + r) % n],))
        return tuple(out) if n else (("empty", c.labels[0]),)

    def canonical(self):
        """ A hashable form invariant under renaming ids and rotating curves. """
        # candidate rotations: those minimizing the name-free signature
        cands = []
        for c in self.curves:
            sigs = [self._local(c, r) for r in range(max(1, len(c)))]
            low = min(sigs)
            cands.append((low, [r for r, sg in enumerate(sigs) if sg == low]))
        order0 = sorted(range(len(self.curves)), key=lambda i: cands[i][0])
        groups = [list(g) for _, g in itertools.groupby(order0, key=lambda i: cands[i][0])]
        best = None
        for perm in itertools.product(*[itertools.permutations(g) for g in groups]):
            order = [i for g in perm for i in g]
            for rots in itertools.product(*[cands[i][1] for i in order]):
                names = {}
                sig = []
                for ci, r in zip(order, rots):
                    c = self.curves[ci]
                    n = len(c)
                    ev = []
                    for k in range(n):
                        e = c.events[(k + r) % n]
                        ev.append(names.setdefault(e[:2], len(names)))
                    sig.append(tuple(ev))
                sig = tuple(sig)
                if best is None or sig < best:
                    best = sig
        local = tuple(cands[i][0] for i in order0)
        return (local, best, self.chi)

    def isomorphic(self, other):
        return self.canonical() == other.canonical()

    # -- serialization ----------------------------------------------------

    def as_dict(self):
        curves = []
        for c in self.curves:
            ev = [["x", e[1], "over" if e[2] else "under"] if e[0] == "x" else ["c", e[1]]
                  for e in c.events]
            curves.append({"events": ev, "labels": ["+" if x else "-" for x in c.labels]})
        return {
            "surface": {"chi": self.chi, "boundaries": len(self.curves)},
            "curves": curves,
            "crossings": [{"id": k, "polarity": "+" if v > 0 else "-"}
                          for k, v in sorted(self.crossings.items())],
            "cusps": [{"id": k, "first": "+" if f > 0 else "-",
                       "second": "+" if s > 0 else "-"}
                      for k, (f, s) in sorted(self.cusps.items())],
        }

    def to_json(self):
        return json.dumps(self.as_dict(), indent=2, sort_keys=True)


def _sign(value, what):
    if value in ("+", 1, "1", "plus", "p"):
        return 1
    if value in ("-", -1, "-1", "minus", "m"):
        return -1
    raise ParseError(f"bad {what} value {value!r}", line=0)


def diagram_from_dict(data):
    """ Build and validate a diagram from its JSON structure. """
    try:
        curves = []
        for c in data.get("curves", []):
            ev = []
            for e in c["events"]:
                if e[0] == "x":
                    ev.append(("x", str(e[1]), e[2] in ("over", True, 1, "o")))
                elif e[0] == "c":
                    ev.append(("c", str(e[1])))
                else:
                    raise ParseError(f"unknown event kind {e[0]!r}", line=0)
            labels = [_sign(x, "label") > 0 for x in c["labels"]]
            curves.append(Curve(tuple(ev), tuple(labels)))
        crossings = {str(x["id"]): _sign(x["polarity"], "polarity")
                     for x in data.get("crossings", [])}
        cusps = {str(x["id"]): (_sign(x["first"], "first polarity"),
                                _sign(x["second"], "second polarity"))
                 for x in data.get("cusps", [])}
        chi = (data.get("surface") or {}).get("chi")
    except (KeyError, TypeError, IndexError) as exc:
        raise ParseError(f"malformed diagram: {exc!r}", line=0) from None
    d = FoldDiagram(tuple(curves), crossings, cusps, chi)
    validate_diagram(d)
    return d


def parse_diagram(text):
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", line=exc.lineno) from None
    if not isinstance(data, dict):
        raise ParseError("diagram must be a JSON object", line=1)
    return diagram_from_dict(data)


# -- validation -----------------------------------------------------------

def validate_diagram(d):
    """ Check the structural invariants; raise :class:`InvalidDiagram`. """
    seen_x = Counter()
    over_x = Counter()
    seen_c = Counter()
    for ci, c in enumerate(d.curves):
        n = len(c.events)
        if len(c.labels) != max(1, n):
            raise InvalidDiagram("label count does not match events", curve=ci)
        for k, e in enumerate(c.events):
            before, after = c.label_before(k), c.labels[k]
            if e[0] == "x":
                if e[1] not in d.crossings:
                    raise InvalidDiagram(f"unknown crossing {e[1]!r}", curve=ci)
                if not (before and after):
                    raise InvalidDiagram("crossing on a MINUS segment", curve=ci, crossing=e[1])
                seen_x[e[1]] += 1
                over_x[e[1]] += bool(e[2])
            elif e[0] == "c":
                if e[1] not in d.cusps:
                    raise InvalidDiagram(f"unknown cusp {e[1]!r}", curve=ci)
                if before == after:
                    raise InvalidDiagram("cusp does not separate labels", curve=ci, cusp=e[1])
                first, second = d.cusps[e[1]]
                entering = after
                if (first == second) != entering:
                    raise InvalidDiagram("cusp polarities disagree with the labels",
                                         curve=ci, cusp=e[1])
                seen_c[e[1]] += 1
            else:
                raise InvalidDiagram(f"unknown event {e!r}", curve=ci)
            if e[0] == "x" and before != after:
                raise InvalidDiagram("labels change at a crossing", curve=ci)
    for x in d.crossings:
        if seen_x[x] != 2 or over_x[x] != 1:
            raise InvalidDiagram("crossing needs one over and one under occurrence", crossing=x)
    for cu in d.cusps:
        if seen_c[cu] != 1:
            raise InvalidDiagram("cusp must occur exactly once", cusp=cu)
    return True


# -- invariants -----------------------------------------------------------

@dataclass(frozen=True)
class PsiForm:
    """ Signed crossing counts between PLUS-carrying curves. """

    curves: tuple
    matrix: np.ndarray

    def __eq__(self, other):
        return (isinstance(other, PsiForm) and self.curves == other.curves
                and np.array_equal(self.matrix, other.matrix))

    def as_dict(self):
        return {"curves": list(self.curves), "matrix": self.matrix.tolist()}


def psi_form(d):
    """ Skew-symmetric form: entry ``(i, j)`` adds the polarity of each
    crossing with curve ``i`` over curve ``j`` and subtracts it for ``j``
    over ``i``. """
    idx = [ci for ci, c in enumerate(d.curves) if c.has_plus()]
    pos = {ci: k for k, ci in enumerate(idx)}
    m = np.zeros((len(idx), len(idx)), dtype=np.int64)
    for x, pol in d.crossings.items():
        occ = d.occurrences(x)
        hi = next(o for o in occ if o[2])[0]
        lo = next(o for o in occ if not o[2])[0]
        m[pos[hi], pos[lo]] += pol
        m[pos[lo], pos[hi]] -= pol
    return PsiForm(tuple(idx), m)


def polarized_counts(d):
    pos = sum(1 for p in d.crossings.values() if p > 0)
    return pos, len(d.crossings) - pos


def degree_h(d):
    """ Degree from the rotation of the field along the PLUS arcs.

    Each cusp where the field points into the PLUS side turns it by
    ``+pi`` relative to the fold frame, every other cusp by ``-pi``.
    """
    turn = sum(np.pi if f > 0 else -np.pi for f, _ in d.cusps.values())
    val = turn / (2 * np.pi)
    r = int(round(val))
    if abs(val - r) > 1e-9:
        raise InvalidDiagram("odd number of positive minus negative cusps")
    return r


# -- editing helpers --------------------------------------------------------

def _segment_ok(d, site):
    ci, k = site
    if not (0 <= ci < len(d.curves)):
        raise SiteObstructed("no such curve", curve=ci)
    c = d.curves[ci]
    if not (0 <= k < max(1, len(c))):
        raise SiteObstructed("no such segment", curve=ci, segment=k)
    return c


def _insert(curve, k, events, labels):
    """ Insert ``events`` at the start of segment ``k``.

    ``labels[i]`` is the label after ``events[i]``; the last one must equal
    the label of the segment being split.
    """
    n = len(curve.events)
    if n == 0:
        return Curve(tuple(events), tuple(labels))
    ev = list(curve.events)
    lab = list(curve.labels)
    ev[k + 1:k + 1] = events
    old = lab[k]
    lab[k:k + 1] = [old] + list(labels)
    # lab[k] is the label after event k, up to the first new event
    return Curve(tuple(ev), tuple(lab[:len(ev)]))


def _remove(curve, positions):
    """ Delete events at ``positions`` whose neighbouring labels agree. """
    pos = set(positions)
    ev = [e for i, e in enumerate(curve.events) if i not in pos]
    lab = [l for i, l in enumerate(curve.labels) if i not in pos]
    if not ev:
        return Curve((), (curve.labels[0] if curve.labels else True,))
    return Curve(tuple(ev), tuple(lab))


def _with(d, curves=None, crossings=None, cusps=None, chi=None, keep_chi=True):
    return FoldDiagram(tuple(curves if curves is not None else d.curves),
                       dict(crossings if crossings is not None else d.crossings),
                       dict(cusps if cusps is not None else d.cusps),
                       d.chi if keep_chi else chi)


# -- alpha moves ----------------------------------------------------------

def alpha_move(d, site_a, site_b, parallel=True, polarity=1, a_over=True):
    """ Push strand ``site_a`` across ``site_b`` creating two crossings.

    Parameters
    ----------
    site_a, site_b : (curve, segment)
        Two PLUS segments bounding an empty region.
    parallel : bool
        Whether the strands run the same way along the bigon; decides the
        order of the two crossings on the second strand.
    polarity : int
        Polarity of the first new crossing; the second gets the opposite.
    a_over : bool
        Whether strand ``a`` is the upper one at both crossings.

    Raises
    ------
    SiteObstructed
        Unknown site, MINUS segment, or both sites on one segment.
    """
    ca = _segment_ok(d, site_a)
    cb = _segment_ok(d, site_b)
    if tuple(site_a) == tuple(site_b):
        raise SiteObstructed("both strands on the same segment", site=list(site_a))
    if not ca.labels[site_a[1]] or not cb.labels[site_b[1]]:
        raise SiteObstructed("crossings need PLUS segments on both strands")
    x1 = d.fresh_crossing_id()
    used = dict(d.crossings)
    used[x1] = 0
    x2 = FoldDiagram((), used)._fresh("x", used)
    pol = 1 if polarity > 0 else -1
    ev_a = [("x", x1, a_over), ("x", x2, a_over)]
    ev_b = [("x", x1, not a_over), ("x", x2, not a_over)]
    if not parallel:
        ev_b.reverse()
    curves = list(d.curves)
    jobs = [(site_a, ev_a), (site_b, ev_b)]
    # later segment of a shared curve first so earlier indices stay valid
    jobs.sort(key=lambda j: (j[0][0], j[0][1]), reverse=True)
    for (ci, k), ev in jobs:
        curves[ci] = _insert(curves[ci], k, ev, [True, True])
    crossings = dict(d.crossings)
    crossings[x1] = pol
    crossings[x2] = -pol
    return _with(d, curves=curves, crossings=crossings)


def _adjacent(curve, i, j):
    n = len(curve.events)
    return n > 1 and ((i + 1) % n == j or (j + 1) % n == i)


def alpha_inverse(d, x1, x2):
    """ Remove two crossings bounding an empty bigon.

    Raises
    ------
    SiteObstructed
        If the crossings do not have opposite polarity, share the same upper
        strand and sit next to each other on both strands.
    """
    if x1 not in d.crossings or x2 not in d.crossings or x1 == x2:
        raise SiteObstructed("unknown crossings")
    if d.crossings[x1] != -d.crossings[x2]:
        raise SiteObstructed("crossings of equal polarity")
    o1 = d.occurrences(x1)
    o2 = d.occurrences(x2)
    ok = False
    for p, q in ((o2[0], o2[1]), (o2[1], o2[0])):
        pairs = [(o1[0], p), (o1[1], q)]
        if all(a[0] == b[0] and a[2] == b[2] and _adjacent(d.curves[a[0]], a[1], b[1])
               for a, b in pairs):
            ok = True
            break
    if not ok:
        raise SiteObstructed("crossings do not bound an empty bigon", crossings=[x1, x2])
    curves = list(d.curves)
    by = {}
    for ci, k, _ in o1 + o2:
        by.setdefault(ci, []).append(k)
    for ci, ks in by.items():
        curves[ci] = _remove(curves[ci], ks)
    crossings = {k: v for k, v in d.crossings.items() if k not in (x1, x2)}
    return _with(d, curves=curves, crossings=crossings)


# -- beta moves -----------------------------------------------------------

def _triangle(d, x_top_mid, x_mid_bot, x_top_bot):
    """ Locate the three strands of an empty triangle or raise. """
    for x in (x_top_mid, x_mid_bot, x_top_bot):
        if x not in d.crossings:
            raise IncompatibleOrder(f"unknown crossing {x!r}")
    if len({x_top_mid, x_mid_bot, x_top_bot}) != 3:
        raise IncompatibleOrder("triangle needs three distinct crossings")
    o12, o23, o13 = (d.occurrences(x) for x in (x_top_mid, x_mid_bot, x_top_bot))
    top12 = next(o for o in o12 if o[2])
    mid12 = next(o for o in o12 if not o[2])
    mid23 = next(o for o in o23 if o[2])
    bot23 = next(o for o in o23 if not o[2])
    top13 = next(o for o in o13 if o[2])
    bot13 = next(o for o in o13 if not o[2])
    checks = ((top12, top13), (mid12, mid23), (bot23, bot13))
    for a, b in checks:
        if a[0] != b[0] or not _adjacent(d.curves[a[0]], a[1], b[1]):
            raise IncompatibleOrder("crossings do not form an empty triangle with "
                                    "a consistent height order")
    return mid12, mid23, top13, bot13


def beta_move(d, x_top_mid, x_mid_bot, x_top_bot):
    """ Flip an empty triangle across its top-bottom crossing.

    The three strands are ordered by height: ``x_top_mid`` has the top
    strand over the middle one, ``x_mid_bot`` the middle over the bottom
    one and ``x_top_bot`` the top over the bottom one.  The middle strand
    passes the triple point: its two crossings swap order and the top-bottom
    crossing, whose vertical segment is now cut by the middle fold, is
    removed.  The crossing count drops by one and the signed count changes
    by the removed polarity.

    Raises
    ------
    IncompatibleOrder
        If the crossings do not form an empty triangle in this height order.
    """
    mid12, mid23, top13, bot13 = _triangle(d, x_top_mid, x_mid_bot, x_top_bot)
    curves = list(d.curves)
    ci = mid12[0]
    ev = list(curves[ci].events)
    ev[mid12[1]], ev[mid23[1]] = ev[mid23[1]], ev[mid12[1]]
    curves[ci] = Curve(tuple(ev), curves[ci].labels)
    by = {}
    for o in (top13, bot13):
        by.setdefault(o[0], []).append(o[1])
    for cj, ks in by.items():
        curves[cj] = _remove(curves[cj], ks)
    crossings = {k: v for k, v in d.crossings.items() if k != x_top_bot}
    return _with(d, curves=curves, crossings=crossings)


def beta_inverse(d, x_top_mid, x_mid_bot, polarity):
    """ Inverse of :func:`beta_move`: add the top-bottom crossing back.

    ``x_top_mid`` and ``x_mid_bot`` must be adjacent on the middle strand.
    The new crossing is placed next to ``x_top_mid`` on the top strand and
    next to ``x_mid_bot`` on the bottom strand.
    """
    for x in (x_top_mid, x_mid_bot):
        if x not in d.crossings:
            raise IncompatibleOrder(f"unknown crossing {x!r}")
    o12, o23 = d.occurrences(x_top_mid), d.occurrences(x_mid_bot)
    top12 = next(o for o in o12 if o[2])
    mid12 = next(o for o in o12 if not o[2])
    mid23 = next(o for o in o23 if o[2])
    bot23 = next(o for o in o23 if not o[2])
    if mid12[0] != mid23[0] or not _adjacent(d.curves[mid12[0]], mid12[1], mid23[1]):
        raise IncompatibleOrder("crossings are not adjacent on the middle strand")
    x13 = d.fresh_crossing_id()
    curves = list(d.curves)
    ci = mid12[0]
    ev = list(curves[ci].events)
    ev[mid12[1]], ev[mid23[1]] = ev[mid23[1]], ev[mid12[1]]
    curves[ci] = Curve(tuple(ev), curves[ci].labels)
    # the top strand meets x13 right after x_top_mid, the bottom one right
    # before x_mid_bot; segment indices are recomputed after each insertion
    jobs = [((top12[0], top12[1]), ("x", x13, True)),
            ((bot23[0], bot23[1] - 1), ("x", x13, False))]
    jobs.sort(key=lambda j: (j[0][0], j[0][1] % max(1, len(curves[j[0][0]]))), reverse=True)
    for (cj, k), e in jobs:
        curves[cj] = _insert(curves[cj], k % len(curves[cj].events), [e], [True])
    crossings = dict(d.crossings)
    crossings[x13] = 1 if polarity > 0 else -1
    return _with(d, curves=curves, crossings=crossings)


# -- cusps ----------------------------------------------------------------

def _flavor(c):
    if hasattr(c, "first"):
        return int(c.first), int(c.second)
    first, second = c
    return int(first), int(second)


def cusp_cancel_rule(a, b, d=None):
    """ Verdict for cancelling two cusps.

    ``a`` and ``b`` are cusp ids of ``d`` (which are then required to be
    consecutive on one curve) or ``(first, second)`` pairs.

    Same first and opposite second polarity change the topology of the
    PLUS region; opposite first and same second polarity (a dove tail)
    preserve it; equal flavors and fully opposite flavors cannot cancel.
    """
    if d is not None:
        ca, ka = d.cusp_position(a)
        cb, kb = d.cusp_position(b)
        if ca != cb or not _consecutive(d.curves[ca], ka, kb):
            raise NotConsecutive("cusps are not consecutive on one curve", cusps=[a, b])
        fa, fb = d.cusps[a], d.cusps[b]
    else:
        fa, fb = _flavor(a), _flavor(b)
    same_first = fa[0] == fb[0]
    same_second = fa[1] == fb[1]
    if same_first and not same_second:
        return TOPOLOGY_CHANGING
    if same_second and not same_first:
        return TOPOLOGY_PRESERVING
    return FORBIDDEN


def _cusp_positions(curve):
    return [k for k, e in enumerate(curve.events) if e[0] == "c"]


def _consecutive(curve, i, j):
    if i == j:
        return False
    cps = _cusp_positions(curve)
    if i not in cps or j not in cps:
        return False
    m = len(cps)
    a, b = cps.index(i), cps.index(j)
    return (a + 1) % m == b or (b + 1) % m == a


def _arc(curve, i, j):
    """ Positions strictly between ``i`` and ``j`` going forward. """
    n = len(curve.events)
    out = []
    k = (i + 1) % n
    while k != j:
        out.append(k)
        k = (k + 1) % n
    return out


def cancel_cusps(d, a, b, arc=None):
    """ Cancel two consecutive cusps ``a`` and ``b``.

    Parameters
    ----------
    arc : {"+", "-", None}
        Label of the arc between the cusps that is contracted; when the
        curve has exactly two cusps both arcs qualify.  By default the PLUS
        arc is used unless it carries crossings that a dove tail would
        destroy.

    A dove-tail pair disappears together with the arc between them.  A
    pair with equal first polarities splits the curve in two: the arc
    between them closes up into its own curve.  ``chi`` changes by the
    identity linking it to the cusp counts.

    Raises
    ------
    NotConsecutive, ForbiddenPair, SiteObstructed
    """
    ca, ka = d.cusp_position(a)
    cb, kb = d.cusp_position(b)
    curve = d.curves[ca]
    if ca != cb or not _consecutive(curve, ka, kb):
        raise NotConsecutive("cusps are not consecutive on one curve", cusps=[a, b])
    rule = cusp_cancel_rule(d.cusps[a], d.cusps[b])
    if rule == FORBIDDEN:
        raise ForbiddenPair("cusps with these polarities cannot cancel", cusps=[a, b])

    options = []
    for i, j in ((ka, kb), (kb, ka)):
        inner = _arc(curve, i, j)
        if any(curve.events[k][0] == "c" for k in inner):
            continue
        options.append((i, j, inner, curve.labels[i]))
    if arc is not None:
        want = arc in ("+", True, "plus")
        options = [o for o in options if o[3] == want]
        if not options:
            raise SiteObstructed("no arc with that label between the cusps")
    if rule == TOPOLOGY_PRESERVING:
        clean = [o for o in options if not o[2]]
        if not clean:
            raise SiteObstructed("dove-tail arc carries crossings", cusps=[a, b])
        options = clean
    options.sort(key=lambda o: (not o[3],))
    i, j, inner, label = options[0]

    n = len(curve.events)
    rest = []
    k = (j + 1) % n
    while k != i:
        rest.append(k)
        k = (k + 1) % n
    outer = curve.labels[j]
    rest_curve = Curve(tuple(curve.events[k] for k in rest),
                       tuple(curve.labels[k] for k in rest) if rest else (outer,))
    curves = list(d.curves)
    if rule == TOPOLOGY_PRESERVING:
        curves[ca] = rest_curve
    else:
        loop = Curve(tuple(curve.events[k] for k in inner),
                     tuple(curve.labels[k] for k in inner) if inner else (label,))
        curves[ca] = rest_curve
        curves.insert(ca + 1, loop)
    cusps = {k: v for k, v in d.cusps.items() if k not in (a, b)}
    chi = d.chi
    if chi is not None:
        removed = [d.cusps[a][0], d.cusps[b][0]]
        chi = chi + (removed.count(1) - removed.count(-1)) // 2
    return FoldDiagram(tuple(curves), dict(d.crossings), cusps, chi)


def insert_cusp_pair(d, site, first_pair, second_pair=None):
    """ Insert a dove-tail pair of cusps at the start of segment ``site``.

    ``first_pair`` and ``second_pair`` are the ``(first, second)``
    polarities of the two new cusps in curve order.  If only the second
    polarity ``s`` is known, pass ``first_pair=s`` and leave
    ``second_pair`` empty; the flavors then follow from the segment label.
    The new cusps bound a short arc of the opposite label.

    Raises
    ------
    SiteObstructed
        Unknown segment.
    ForbiddenPair
        The flavors are not a dove-tail pair or disagree with the label.
    """
    curve = _segment_ok(d, site)
    ci, k = site
    label = curve.labels[k]
    if second_pair is None:
        s = 1 if int(first_pair) > 0 else -1
        # on a PLUS segment the first cusp ends PLUS, the second restarts it
        p = (-s, s) if label else (s, s)
        q = (s, s) if label else (-s, s)
    else:
        p, q = _flavor(first_pair), _flavor(second_pair)
    if cusp_cancel_rule(p, q) != TOPOLOGY_PRESERVING:
        raise ForbiddenPair("inserted cusps must form a dove-tail pair",
                            flavors=[list(p), list(q)])
    entering_p = not label
    if (p[0] == p[1]) != entering_p or (q[0] == q[1]) != label:
        raise ForbiddenPair("flavors disagree with the segment label",
                            flavors=[list(p), list(q)])
    c1 = d.fresh_cusp_id()
    cusps = dict(d.cusps)
    cusps[c1] = p
    c2 = FoldDiagram((), {}, cusps)._fresh("c", cusps)
    cusps[c2] = q
    curves = list(d.curves)
    curves[ci] = _insert(curve, k, [("c", c1), ("c", c2)], [not label, label])
    return FoldDiagram(tuple(curves), dict(d.crossings), cusps, d.chi)


@dataclass(frozen=True)
class Elimination:
    diagram: FoldDiagram
    log: tuple

    def as_dict(self):
        return {"diagram": self.diagram.as_dict(), "log": list(self.log)}


def eliminate_cusps(d):
    """ Cancel cusps pairwise until none are left.

    The first cusp that starts a PLUS arc is paired with the next cusp.
    The PLUS arc between them is contracted when it carries no crossings or
    when the pair splits the curve; otherwise the following MINUS arc is
    used instead, so crossings are never lost.

    Raises
    ------
    NonTerminating
        If the step cap ``10 * #cusps`` is exceeded.
    """
    cap = 10 * max(1, d.n_cusps)
    log = []
    cur = d
    steps = 0
    while cur.cusps:
        steps += 1
        if steps > cap:
            raise NonTerminating("cusp elimination exceeded its step cap", cap=cap)
        ci = next(i for i, c in enumerate(cur.curves) if _cusp_positions(c))
        curve = cur.curves[ci]
        cps = _cusp_positions(curve)
        start = next(k for k in cps if curve.labels[k])
        m = len(cps)
        nxt = cps[(cps.index(start) + 1) % m]
        a, b = curve.events[start][1], curve.events[nxt][1]
        rule = cusp_cancel_rule(cur.cusps[a], cur.cusps[b])
        inner = _arc(curve, start, nxt)
        if rule == TOPOLOGY_CHANGING or not inner:
            cur = cancel_cusps(cur, a, b, arc="+")
            log.append({"step": steps, "cusps": [a, b], "arc": "+", "rule": rule})
            continue
        after = cps[(cps.index(nxt) + 1) % m]
        c = curve.events[after][1]
        rule = cusp_cancel_rule(cur.cusps[b], cur.cusps[c])
        cur = cancel_cusps(cur, b, c, arc="-")
        log.append({"step": steps, "cusps": [b, c], "arc": "-", "rule": rule})
    return Elimination(cur, tuple(log))


def cancellation_moves(d):
    """ Every admissible single cancellation as ``(a, b, arc, result)``. """
    out = []
    for c in d.curves:
        cps = _cusp_positions(c)
        m = len(cps)
        for t in range(m if m > 2 else min(m, 1)):
            i, j = cps[t], cps[(t + 1) % m]
            a, b = c.events[i][1], c.events[j][1]
            for arc in ("+", "-"):
                try:
                    out.append((a, b, arc, cancel_cusps(d, a, b, arc=arc)))
                except (SiteObstructed, ForbiddenPair):
                    pass
    return out


# -- random diagrams --------------------------------------------------------

def random_diagram(rng, max_curves=3, max_cusp_pairs=3, max_crossings=6):
    """ A random valid diagram for property tests.

    ``rng`` is a :class:`numpy.random.Generator`.
    """
    n_curves = int(rng.integers(1, max_curves + 1))
    curves = []
    cusps = {}
    for ci in range(n_curves):
        pairs = int(rng.integers(0, max_cusp_pairs + 1))
        if pairs == 0:
            curves.append(Curve((), (bool(rng.integers(0, 2)) or ci == 0,)))
            continue
        events, labels = [], []
        for _ in range(pairs):
            for entering in (True, False):
                cid = f"c{len(cusps)}"
                s = 1 if rng.integers(0, 2) else -1
                cusps[cid] = (s, s) if entering else (-s, s)
                events.append(("c", cid))
                labels.append(entering)
        curves.append(Curve(tuple(events), tuple(labels)))
    d = FoldDiagram(tuple(curves), {}, cusps, None)
    for _ in range(int(rng.integers(0, max_crossings + 1))):
        sites = plus_segments(d)
        if len(sites) < 2:
            break
        i, j = rng.choice(len(sites), size=2, replace=False)
        d = alpha_move(d, sites[i], sites[j], parallel=bool(rng.integers(0, 2)),
                       polarity=1 if rng.integers(0, 2) else -1,
                       a_over=bool(rng.integers(0, 2)))
        # keep one of the two crossings at random to avoid only bigons
        if rng.integers(0, 2):
            xs = sorted(d.crossings)[-2:]
            d = _drop_crossing(d, xs[int(rng.integers(0, 2))])
    return d


def _drop_crossing(d, x):
    curves = list(d.curves)
    by = {}
    for ci, k, _ in d.occurrences(x):
        by.setdefault(ci, []).append(k)
    for ci, ks in by.items():
        curves[ci] = _remove(curves[ci], ks)
    crossings = {k: v for k, v in d.crossings.items() if k != x}
    return _with(d, curves=curves, crossings=crossings)


def plus_segments(d):
    """ All ``(curve, segment)`` sites with a PLUS label. """
    return [(ci, k) for ci, c in enumerate(d.curves)
            for k in range(max(1, len(c))) if c.labels[k]]


def minimal_elimination_steps(d, limit=8):
    """ Fewest cancellations reaching zero cusps (breadth first search). """
    start = d
    seen = {start.canonical()}
    queue = deque([(start, 0)])
    while queue:
        cur, depth = queue.popleft()
        if not cur.cusps:
            return depth
        if depth >= limit:
            continue
        for _, _, _, nxt in cancellation_moves(cur):
            key = nxt.canonical()
            if key not in seen:
                seen.add(key)
                queue.append((nxt, depth + 1))
    return None
