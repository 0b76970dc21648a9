"""Lower and upper bounds on the number of double tangent trajectories.

Every calculator returns a :class:`BoundReport` naming the inequality it
evaluates.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import NotUnimodular, UnknownName
from .origami import presentation_complexity

# Volume of the regular ideal hyperbolic tetrahedron, 3 * Lambda(pi / 3),
# where Lambda(t) = 1/2 * sum_k sin(2 k t) / k**2 is the Lobachevsky
# function.  Evaluated to 30 digits with mpmath (Clausen function
# Cl_2(2 pi / 3) * 3 / 2) and frozen here.
V0 = 1.0149416064096536


@dataclass(frozen=True)
class BoundReport:
    name: str
    inputs: dict
    lower: object = None
    upper: object = None
    statement: str = ""
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.lower is not None and self.upper is not None and self.lower > self.upper:
            raise ValueError("lower bound exceeds upper bound")

    def as_dict(self):
        def plain(x):
            if isinstance(x, Fraction):
                return {"num": x.numerator, "den": x.denominator}
            return x
        out = {"bound": self.name, "inputs": self.inputs,
               "lower": plain(self.lower), "upper": plain(self.upper),
               "statement": self.statement}
        out.update(self.extra)
        return out


def gc_interval(c):
    """ Double tangent count of a minimal flow lies in ``[c, 6 c]``. """
    if not isinstance(c, int) or c < 0:
        raise ValueError("c must be a non-negative integer")
    return BoundReport("gc_interval", {"c": c}, c, 6 * c,
                       "c <= gc <= 6 c for spine complexity c")


def homology_bound(torsion_order, rank):
    """ ``max(0, ceil(2 log_5 |Tor H_1| + rank H_1 - 1))``. """
    if not isinstance(torsion_order, int) or torsion_order < 1:
        raise ValueError("torsion order must be a positive integer")
    if not isinstance(rank, int) or rank < 0:
        raise ValueError("rank must be a non-negative integer")
    # exact for powers of 5, where floating logs can land just above
    k, t = 0, torsion_order
    while t % 5 == 0:
        t //= 5
        k += 1
    if t == 1:
        raw = 2 * k + rank - 1
    else:
        raw = math.ceil(2 * math.log(torsion_order, 5) + rank - 1)
    return BoundReport("homology_bound", {"torsion_order": torsion_order, "rank": rank},
                       max(0, raw), None,
                       "gc >= 2 log_5 |Tor H_1| + rank H_1 - 1, clamped at 0")


def volume_bound(volume):
    """ ``ceil(V / V0)`` for a closed hyperbolic manifold of volume ``V``. """
    if not volume > 0:
        raise ValueError("volume must be positive")
    return BoundReport("volume_bound", {"volume": volume}, math.ceil(volume / V0), None,
                       "gc >= V / V0, V0 the regular ideal tetrahedron volume",
                       {"V0": V0})


def group_bound(p):
    """ One third of the presentation complexity. """
    n = presentation_complexity(p)
    return BoundReport("group_bound", {"complexity": n}, Fraction(n, 3), None,
                       "gc >= c(pi_1) / 3")


def lens_bound(matrix):
    """ ``4 |b|`` for a gluing matrix ``((a, b), (c, d))`` of determinant 1. """
    try:
        (a, b), (c, d) = matrix
        a, b, c, d = (int(x) for x in (a, b, c, d))
    except (TypeError, ValueError) as exc:
        raise NotUnimodular("expected a 2 x 2 integer matrix") from exc
    if a * d - b * c != 1:
        raise NotUnimodular("determinant must be 1", matrix=[[a, b], [c, d]])
    return BoundReport("lens_bound", {"matrix": [[a, b], [c, d]]}, None, 4 * abs(b),
                       "gc <= 4 |b| for two solid tori glued along the matrix")


def cm_upper_bound(length):
    """ Four times the minimal presentation length of a Morse splitting. """
    if not isinstance(length, int) or length < 0:
        raise ValueError("length must be a non-negative integer")
    return BoundReport("cm_upper_bound", {"length": length}, None, 4 * length,
                       "gc <= 4 c_M for the Morse presentation length c_M")


# lower bounds for punctured elliptic manifolds, from the complexity census
CENSUS_TABLE = {
    "P_24": 4, "P_48": 5, "P_120": 5,
    "Q_8": 2, "Q_12": 3, "Q_16": 4, "Q_20": 5, "Q_24": 6,
    "L_4_1": 1, "L_5_2": 1,
    "L_5_1": 2, "L_7_2": 2, "L_8_3": 2,
    "L_6_1": 3, "L_9_2": 3, "L_10_3": 3, "L_11_3": 3, "L_12_5": 3, "L_13_5": 3,
}


def census_lookup(name):
    """ Tabulated lower bound for a punctured elliptic manifold.

    Names are ``P_n`` and ``Q_n`` for quotients of the 3-sphere and
    ``L_p_q`` for lens spaces.
    """
    if name not in CENSUS_TABLE:
        raise UnknownName("not in the census table", name=name,
                          known=sorted(CENSUS_TABLE))
    return BoundReport("census_lookup", {"name": name}, CENSUS_TABLE[name], None,
                       "gc >= c for the tabulated complexity c")
