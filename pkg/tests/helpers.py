"""Cached fixture pipelines shared by the test modules."""

import functools
import json

from gradspine.fixtures import make_fixture
from gradspine.strata import stratify
from gradspine.tangle import detect_double_tangents


def _key(params):
    return json.dumps(params or {}, sort_keys=True)


@functools.lru_cache(maxsize=None)
def _mesh(kind, key):
    return make_fixture(kind, json.loads(key))


def mesh(kind, params=None):
    return _mesh(kind, _key(params))


@functools.lru_cache(maxsize=None)
def _pipeline(kind, key, direction, seed):
    m = _mesh(kind, key)
    s = stratify(m, direction, seed=seed)
    t = detect_double_tangents(m, s.direction, s.folds)
    return s, t


def pipeline(kind, params=None, direction=(0.0, 0.0, 1.0), seed=0):
    """ ``(stratification, tangle)`` for a fixture and direction. """
    return _pipeline(kind, _key(params), tuple(float(x) for x in direction), seed)


# the mesh fixtures used for the spine and resolution checks
SPINE_CASES = [
    ("icosphere", {}, (0, 0, 1)),
    ("torus", {}, (0, 0, 1)),
    ("torus", {"axis": "1,0,0"}, (0, 0, 1)),
    ("dented_sphere", {}, (1, 0, 0)),
    ("dented_sphere", {}, (0, 0, 1)),
    ("dented_sphere", {"count": 2}, (0.3, 0.2, 1)),
    ("peanut", {}, (0, 0, 1)),
    ("peanut", {"lobes": 3, "shift": 0.15}, (0, 0, 1)),
    ("peanut", {"lobes": 3, "shift": 0.3, "wobble": 0.2}, (0, 0, 1)),
    ("cusp_patch", {}, (0, 0, 1)),
    ("dovetail_patch", {}, (0, 0, 1)),
    ("peanut", {}, (1, 0.3, 0.2)),
    ("genus_n", {"genus": 2}, (0.1, 0.2, 1)),
]

# crafted fixtures for the double tangent oracle
TANGLE_CASES = [
    ("peanut", {"lobes": 3, "shift": 0.15}, (0, 0, 1)),
    ("peanut", {"lobes": 3, "shift": 0.3, "wobble": 0.2}, (0, 0, 1)),
    ("peanut", {"lobes": 3, "shift": 0.2, "subdiv": 5}, (0.1, 0, 1)),
    ("dented_sphere", {"count": 2}, (0.3, 0.2, 1)),
    ("torus", {"axis": "1,0,0"}, (0.2, 0.1, 1)),
]
