"""Exception hierarchy.

Every error carries a stable ``code`` string.  Errors deriving from
``InputError`` are problems with the input file itself (exit status 2 on the
command line); everything else is a domain error (exit status 1).
"""


class ArtifactError(Exception):
    code = "error"

    def __init__(self, message="", **details):
        super().__init__(message or self.code)
        self.details = details

    def to_dict(self):
        out = {"code": self.code, "message": str(self)}
        if self.details:
            out["details"] = {k: _plain(v) for k, v in sorted(self.details.items())}
        return out


def _plain(value):
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if hasattr(value, "tolist"):
        return value.tolist()
    if isinstance(value, (int, float, str, bool)) or value is None:
        return value
    return repr(value)


class InputError(ArtifactError):
    code = "input_error"


class ParseError(InputError):
    code = "parse_error"


class NotTriangulated(InputError):
    code = "not_triangulated"


class NotClosed(InputError):
    code = "not_closed"


# geometry
class NonManifoldMesh(ArtifactError):
    code = "non_manifold_mesh"


class PerturbationExhausted(ArtifactError):
    code = "perturbation_exhausted"


class OpenFoldChain(ArtifactError):
    code = "open_fold_chain"


class TangencyDegenerate(ArtifactError):
    code = "tangency_degenerate"


class TripleTangency(ArtifactError):
    code = "triple_tangency"


class ProjectionMiss(ArtifactError):
    code = "projection_miss"


class BadParams(ArtifactError):
    code = "bad_params"


# spines
class InvalidSpine(ArtifactError):
    code = "invalid_spine"


class InvalidPattern(InvalidSpine):
    code = "invalid_pattern"


class MarkerDiscontinuity(InvalidSpine):
    code = "marker_discontinuity"


class NotADiskCell(ArtifactError):
    code = "not_a_disk_cell"


# diagrams
class InvalidDiagram(ArtifactError):
    code = "invalid_diagram"


class SiteObstructed(ArtifactError):
    code = "site_obstructed"


class IncompatibleOrder(ArtifactError):
    code = "incompatible_order"


class NotConsecutive(ArtifactError):
    code = "not_consecutive"


class ForbiddenPair(ArtifactError):
    code = "forbidden_pair"


class NonTerminating(ArtifactError):
    code = "non_terminating"


# origami
class PatternViolation(ArtifactError):
    code = "pattern_violation"


class MultiplicityViolation(ArtifactError):
    code = "multiplicity_violation"


# census and bounds
class ScaleExceeded(ArtifactError):
    code = "scale_exceeded"


class UnknownName(ArtifactError):
    code = "unknown_name"


class NotUnimodular(ArtifactError):
    code = "not_unimodular"
