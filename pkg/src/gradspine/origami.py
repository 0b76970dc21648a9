"""Origami codes and the group presentations they carry.

An origami code describes a surface (usually a disk) cut into cells whose
boundary arcs are glued onto interior arcs.  Cells are either ground cells
or waterfall polygons.  Arcs lying on a waterfall trajectory carry a
generator label, and every waterfall polygon contributes one relator.

JSON layout::

    {"surface": "disk",
     "arcs": [{"label": "x", "kind": "boundary" | "interior",
               "ends": ["p", "q"], "generator": "a" | null,
               "free": false}, ...],
     "identifications": [{"boundary": "x", "interior": "y",
                          "orientation": 1 | -1, "pattern": optional}, ...],
     "cells": [{"label": "W", "ground": false, "orientation": 1 | -1,
                "boundary": ["x", "-y", ...]}, ...]}

A leading ``-`` in a cell boundary runs the arc from its second end to
its first.
"""

import json
from collections import Counter
from dataclasses import dataclass
from importlib import resources

from .errors import MultiplicityViolation, ParseError, PatternViolation

# local identification patterns, by how the glued arcs meet at their ends:
#   disjoint  the arcs share no end point
#   hinge     one shared end point, fixed by the gluing
#   touch     the interior arc meets the disk boundary at an end point
#             that is not an end of the glued boundary arc
#   bigon     both end points shared and fixed
PATTERNS = ("disjoint", "hinge", "touch", "bigon")


@dataclass(frozen=True)
class Arc:
    label: str
    kind: str
    ends: tuple
    generator: str = None
    free: bool = False


@dataclass(frozen=True)
class Identification:
    boundary: str
    interior: str
    orientation: int = 1
    pattern: str = None


@dataclass(frozen=True)
class OrigamiCell:
    label: str
    boundary: tuple
    ground: bool = False
    orientation: int = 1


@dataclass(frozen=True)
class OrigamiCode:
    surface: str
    arcs: tuple
    identifications: tuple
    cells: tuple

    def arc(self, label):
        for a in self.arcs:
            if a.label == label:
                return a
        raise KeyError(label)

    def as_dict(self):
        return {
            "surface": self.surface,
            "arcs": [{"label": a.label, "kind": a.kind, "ends": list(a.ends),
                      "generator": a.generator, "free": a.free} for a in self.arcs],
            "identifications": [{"boundary": i.boundary, "interior": i.interior,
                                 "orientation": i.orientation, "pattern": i.pattern}
                                for i in self.identifications],
            "cells": [{"label": c.label, "ground": c.ground,
                       "orientation": c.orientation, "boundary": list(c.boundary)}
                      for c in self.cells],
        }


def origami_from_dict(data):
    """ Build an :class:`OrigamiCode` from decoded JSON. """
    try:
        arcs = tuple(Arc(str(a["label"]), str(a["kind"]),
                         tuple(str(x) for x in a["ends"]),
                         a.get("generator"), bool(a.get("free", False)))
                     for a in data.get("arcs", []))
        idents = tuple(Identification(str(i["boundary"]), str(i["interior"]),
                                      int(i.get("orientation", 1)), i.get("pattern"))
                       for i in data.get("identifications", []))
        cells = tuple(OrigamiCell(str(c["label"]), tuple(str(x) for x in c["boundary"]),
                                  bool(c.get("ground", False)),
                                  int(c.get("orientation", 1)))
                      for c in data.get("cells", []))
        surface = str(data.get("surface", "disk"))
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise ParseError(f"malformed origami code: {exc}") from exc
    for a in arcs:
        if a.kind not in ("boundary", "interior") or len(a.ends) != 2:
            raise ParseError("arc needs kind boundary/interior and two ends", arc=a.label)
    for i in idents:
        if i.orientation not in (1, -1):
            raise ParseError("orientation must be 1 or -1", boundary=i.boundary)
    for c in cells:
        if c.orientation not in (1, -1):
            raise ParseError("orientation must be 1 or -1", cell=c.label)
    labels = [a.label for a in arcs]
    if len(set(labels)) != len(labels):
        raise ParseError("duplicate arc labels")
    return OrigamiCode(surface, arcs, idents, cells)


def parse_origami(text):
    """ Parse an origami code from JSON text. """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", line=exc.lineno) from exc
    if not isinstance(data, dict):
        raise ParseError("origami code must be a JSON object")
    return origami_from_dict(data)


def bundled_origami(name):
    """ Load an origami code shipped in the package data directory. """
    try:
        text = resources.files(__package__).joinpath("data", f"{name}.json").read_text()
    except FileNotFoundError:
        raise ParseError(f"no bundled origami named {name!r}") from None
    return parse_origami(text)


class _UnionFind:
    def __init__(self):
        self.parent = {}

    def find(self, x):
        self.parent.setdefault(x, x)
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        self.parent[self.find(a)] = self.find(b)


def _pattern(code, ident):
    b = code.arc(ident.boundary)
    i = code.arc(ident.interior)
    image = i.ends if ident.orientation > 0 else i.ends[::-1]
    shared = set(b.ends) & set(i.ends)
    fixed = {x for x, y in zip(b.ends, image) if x == y}
    rim = {x for a in code.arcs if a.kind == "boundary" for x in a.ends}
    if not shared:
        return "touch" if set(i.ends) & rim else "disjoint"
    if shared != fixed:
        return None
    return "hinge" if len(shared) == 1 else "bigon"


@dataclass(frozen=True)
class OrigamiVerdict:
    valid: bool
    patterns: tuple
    vertex_multiplicity: int
    arc_multiplicity: int

    def as_dict(self):
        return {"valid": self.valid, "patterns": list(self.patterns),
                "vertex_multiplicity": self.vertex_multiplicity,
                "arc_multiplicity": self.arc_multiplicity}


def validate_origami(code):
    """ Check gluing multiplicities and local patterns.

    Returns
    -------
    OrigamiVerdict

    Raises
    ------
    PatternViolation
        An identification that is not one of :data:`PATTERNS`, or glues
        arcs of the wrong kinds or with different generators.
    MultiplicityViolation
        An arc interior covered more than twice or a vertex more than
        three times.
    """
    by_label = {a.label: a for a in code.arcs}
    for ident in code.identifications:
        for lab, kind in ((ident.boundary, "boundary"), (ident.interior, "interior")):
            if lab not in by_label:
                raise PatternViolation("unknown arc", arc=lab)
            if by_label[lab].kind != kind:
                raise PatternViolation(f"arc must be a {kind} arc", arc=lab)
        if by_label[ident.boundary].generator != by_label[ident.interior].generator:
            raise PatternViolation("glued arcs carry different generators",
                                   arc=ident.boundary)

    # every glued boundary arc adds one preimage to its interior arc
    used_b = Counter(i.boundary for i in code.identifications)
    used_i = Counter(i.interior for i in code.identifications)
    for lab, n in used_b.items():
        if n > 1:
            raise MultiplicityViolation("boundary arc glued more than once", arc=lab)
    for lab, n in used_i.items():
        if n > 1:
            raise MultiplicityViolation("arc interior covered more than twice",
                                        arc=lab, multiplicity=n + 1)

    patterns = []
    for ident in code.identifications:
        p = _pattern(code, ident)
        if p is None or (ident.pattern is not None and ident.pattern != p):
            raise PatternViolation("identification matches no local pattern",
                                   arc=ident.boundary, declared=ident.pattern, found=p)
        patterns.append(p)

    uf = _UnionFind()
    points = {x for a in code.arcs for x in a.ends}
    for x in points:
        uf.find(x)
    for ident in code.identifications:
        b = by_label[ident.boundary]
        i = by_label[ident.interior]
        image = i.ends if ident.orientation > 0 else i.ends[::-1]
        for x, y in zip(b.ends, image):
            uf.union(x, y)
    classes = Counter(uf.find(x) for x in points)
    worst = max(classes.values(), default=1)
    if worst > 3:
        root = max(classes, key=lambda r: (classes[r], r))
        raise MultiplicityViolation("vertex covered more than three times",
                                    vertex=root, multiplicity=worst)

    for c in code.cells:
        for tok in c.boundary:
            if tok.lstrip("-") not in by_label:
                raise PatternViolation("cell boundary names an unknown arc",
                                       arc=tok, cell=c.label)
    sides = Counter(tok.lstrip("-") for c in code.cells for tok in c.boundary)
    for lab, n in sides.items():
        cap = 1 if by_label[lab].kind == "boundary" else 2
        if n > cap:
            raise PatternViolation("arc bounds too many cells", arc=lab, sides=n)

    arc_mult = 1 + max(used_i.values(), default=0)
    return OrigamiVerdict(True, tuple(patterns), worst, arc_mult)


# -- presentations ----------------------------------------------------------

def _free_reduce(word):
    out = []
    for g, e in word:
        if out and out[-1][0] == g and out[-1][1] == -e:
            out.pop()
        else:
            out.append((g, e))
    return tuple(out)


def _cyclic_reduce(word):
    word = list(_free_reduce(word))
    while len(word) > 1 and word[0][0] == word[-1][0] and word[0][1] == -word[-1][1]:
        word = word[1:-1]
    return tuple(word)


def _inverse(word):
    return tuple((g, -e) for g, e in reversed(word))


def format_word(word):
    """ ``(("a", 1), ("b", -1))`` as ``"a b^-1"``. """
    return " ".join(g if e > 0 else f"{g}^-1" for g, e in word)


def parse_word(text):
    """ Inverse of :func:`format_word`; also accepts ``*`` separators. """
    out = []
    for tok in text.replace("*", " ").split():
        if tok.endswith("^-1"):
            out.append((tok[:-3], -1))
        else:
            out.append((tok, 1))
    return tuple(out)


@dataclass(frozen=True)
class Presentation:
    generators: tuple
    relators: tuple

    def as_dict(self):
        return {"generators": list(self.generators),
                "relators": [format_word(r) for r in self.relators],
                "complexity": presentation_complexity(self)}

    @classmethod
    def from_strings(cls, generators, relators):
        rels = tuple(_free_reduce(parse_word(r)) for r in relators)
        gens = tuple(generators)
        for r in rels:
            for g, _ in r:
                if g not in gens:
                    raise ValueError(f"relator letter {g!r} is not a generator")
        return cls(gens, rels)


def presentation(code):
    """ Generators and one relator per waterfall polygon.

    Letters are read along each polygon boundary in its preferred
    orientation; arcs without a generator (glued to the ground) are skipped.
    """
    by_label = {a.label: a for a in code.arcs}
    gens = set()
    relators = []
    for c in code.cells:
        if c.ground:
            continue
        word = []
        for tok in c.boundary:
            sign = -1 if tok.startswith("-") else 1
            arc = by_label[tok.lstrip("-")]
            if arc.generator is None:
                continue
            gens.add(arc.generator)
            word.append((arc.generator, sign))
        if c.orientation < 0:
            word = list(_inverse(word))
        relators.append(_free_reduce(word))
    return Presentation(tuple(sorted(gens)), tuple(relators))


def presentation_complexity(p):
    """ Total number of letters over all relators. """
    return sum(len(r) for r in p.relators)


def _counts(relators):
    total = Counter()
    where = {}
    for k, r in enumerate(relators):
        for g, _ in r:
            total[g] += 1
            where.setdefault(g, set()).add(k)
    return total, where


def _substitute(word, g, image):
    out = []
    for h, e in word:
        if h == g:
            out.extend(image if e > 0 else _inverse(image))
        else:
            out.append((h, e))
    return _free_reduce(out)


def simplify(p, substitute=False):
    """ Tietze-safe simplification.

    A generator that occurs exactly once over all relators is dropped
    together with its relator (lowest label first).  Relators are then
    cyclically reduced and empty ones removed.  With ``substitute`` a
    generator occurring once in some relator is also solved for and
    substituted into the others, shortest relator first.
    """
    gens = list(p.generators)
    rels = [_cyclic_reduce(r) for r in p.relators]
    while True:
        rels = [r for r in rels if r]
        total, where = _counts(rels)
        single = sorted(g for g in gens if total[g] == 1)
        if single:
            g = single[0]
            k = next(iter(where[g]))
            gens.remove(g)
            del rels[k]
            continue
        if not substitute:
            break
        best = None
        for k, r in enumerate(rels):
            c = Counter(h for h, _ in r)
            for i, (g, e) in enumerate(r):
                if c[g] == 1 and (best is None or len(r) < len(rels[best[0]])):
                    best = (k, i)
                    break
        if best is None:
            break
        k, i = best
        r = rels.pop(k)
        g, e = r[i]
        # r = u g^e w  gives  g^e = u^-1 w^-1
        image = _free_reduce(_inverse(r[:i]) + _inverse(r[i + 1:]))
        if e < 0:
            image = _inverse(image)
        gens.remove(g)
        rels = [_cyclic_reduce(_substitute(x, g, image)) for x in rels]
    return Presentation(tuple(gens), tuple(rels))


def relation_matrix(p):
    """ Integer exponent-sum matrix, one row per relator. """
    idx = {g: k for k, g in enumerate(p.generators)}
    rows = []
    for r in p.relators:
        row = [0] * len(p.generators)
        for g, e in r:
            row[idx[g]] += e
        rows.append(row)
    return rows


def abelian_invariants(p):
    """ ``(rank, torsion)`` of the abelianized group.

    ``torsion`` lists the invariant factors greater than one.
    """
    from sympy import Matrix
    from sympy.matrices.normalforms import invariant_factors

    n = len(p.generators)
    rows = relation_matrix(p)
    if not rows or n == 0:
        return n, []
    factors = [abs(int(x)) for x in invariant_factors(Matrix(rows))]
    nonzero = [x for x in factors if x != 0]
    return n - len(nonzero), [x for x in nonzero if x != 1]
