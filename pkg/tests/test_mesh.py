import numpy as np
import pytest

from gradspine.errors import NonManifoldMesh, NotClosed, NotTriangulated, ParseError
from gradspine.fixtures import icosphere
from gradspine.mesh import TriMesh, format_off, load_off, parse_off, write_off

TETRA = """OFF
4 4 0
0 0 0
1 0 0
0 1 0
0 0 1
3 0 2 1
3 0 1 3
3 0 3 2
3 1 2 3
"""


def test_parse_tetrahedron():
    m = parse_off(TETRA)
    assert m.vertices.shape == (4, 3)
    assert m.faces.shape == (4, 3)
    assert m.euler_characteristic() == 2


def test_comments_and_split_header():
    text = "# a comment\nOFF\n\n4 4 0  # counts\n" + TETRA.split("\n", 2)[2]
    assert len(parse_off(text).faces) == 4


def test_roundtrip(tmp_path):
    m = icosphere(2)
    path = tmp_path / "ico.off"
    write_off(m, path)
    back = load_off(path)
    assert np.array_equal(back.faces, m.faces)
    assert np.array_equal(back.vertices, m.vertices)
    assert format_off(back) == format_off(m)


def test_quad_face_rejected():
    text = "OFF\n4 1 0\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n4 0 1 2 3\n"
    with pytest.raises(NotTriangulated):
        parse_off(text)


def test_open_surface_rejected():
    lines = TETRA.strip().split("\n")
    text = "\n".join(["OFF", "4 3 0"] + lines[2:9]) + "\n"
    with pytest.raises(NotClosed):
        parse_off(text)


@pytest.mark.parametrize("text", ["", "PLY\n", "OFF\n1 0 0\n0 0\n", "OFF\n2 1 0\n0 0 0\n"])
def test_malformed(text):
    with pytest.raises(ParseError):
        parse_off(text)


def test_index_out_of_range():
    with pytest.raises(ParseError):
        parse_off(TETRA.replace("3 1 2 3", "3 1 2 9"))


def test_flipped_face_rejected():
    with pytest.raises(NonManifoldMesh):
        parse_off(TETRA.replace("3 1 2 3", "3 1 3 2"))


def test_two_components_rejected():
    m = parse_off(TETRA)
    v = np.vstack([m.vertices, m.vertices + 5])
    f = np.vstack([m.faces, m.faces + 4])
    with pytest.raises(NonManifoldMesh):
        TriMesh(v, f)


def test_missing_file(tmp_path):
    with pytest.raises(ParseError):
        load_off(tmp_path / "nope.off")


def test_icosphere_face_count():
    assert len(icosphere(4).faces) == 1280


def test_immutable():
    m = parse_off(TETRA)
    with pytest.raises(ValueError):
        m.vertices[0, 0] = 3.0
