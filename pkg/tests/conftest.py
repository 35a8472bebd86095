import pytest

from oracles import simplex_points
from secfan.config import normalize_configuration
from secfan.symmetry import coordinate_symmetry_group
from secfan.triang import parse_triangulation

# 2-fold triangle, points (0,0),(0,1),(0,2),(1,0),(1,1),(2,0)
PHI_FIXTURES = {
    0: ("{{0,2,5}}", (4, 0, 4, 0, 0, 4)),
    1: ("{{0,2,4},{0,4,5}}", (4, 0, 2, 0, 4, 2)),
    2: ("{{0,1,4},{0,4,5},{1,2,4}}", (3, 2, 1, 0, 4, 2)),
    3: ("{{0,2,4},{0,3,4},{3,4,5}}", (3, 0, 2, 2, 4, 1)),
    4: ("{{0,1,4},{0,3,4},{1,2,4},{3,4,5}}", (2, 2, 1, 2, 4, 1)),
    5: ("{{0,2,3},{2,3,5}}", (2, 0, 4, 4, 0, 2)),
    6: ("{{0,1,3},{1,2,3},{2,3,5}}", (1, 2, 3, 4, 0, 2)),
    7: ("{{0,2,3},{2,3,4},{3,4,5}}", (2, 0, 3, 4, 2, 1)),
    8: ("{{0,1,3},{1,2,3},{2,3,4},{3,4,5}}", (1, 2, 2, 4, 2, 1)),
    9: ("{{0,1,5},{1,2,5}}", (2, 4, 2, 0, 0, 4)),
    10: ("{{0,1,3},{1,2,5},{1,3,5}}", (1, 4, 2, 2, 0, 3)),
    11: ("{{0,1,5},{1,2,4},{1,4,5}}", (2, 4, 1, 0, 2, 3)),
    12: ("{{0,1,3},{1,2,4},{1,3,5},{1,4,5}}", (1, 4, 1, 2, 2, 2)),
    13: ("{{0,1,3},{1,2,4},{1,3,4},{3,4,5}}", (1, 3, 1, 3, 3, 1)),
}

ETA = {
    (1, 0, 1, 0, 0, 1): {0},
    (1, 0, 0, 0, 2, 0): {1, 2, 3, 4},
    (0, 0, 1, 2, 0, 0): {5, 6, 7, 8},
    (0, 2, 0, 0, 0, 1): {9, 10, 11, 12},
    (0, 1, 0, 1, 1, 0): {13},
}

TWO_D2_PLANE = [(0, 0), (0, 1), (0, 2), (1, 0), (1, 1), (2, 0)]


def tri(k):
    return parse_triangulation(PHI_FIXTURES[k][0])


@pytest.fixture(scope="session")
def d2():
    """2-fold triangle in homogeneous coordinates (same point order as the plane one)."""
    return normalize_configuration(simplex_points(2, 2))


@pytest.fixture(scope="session")
def s3(d2):
    return coordinate_symmetry_group(d2)


@pytest.fixture(scope="session")
def segment():
    return normalize_configuration([(0,), (1,), (2,)])


@pytest.fixture(scope="session")
def d3_2():
    return normalize_configuration(simplex_points(3, 2))


@pytest.fixture(scope="session")
def d3_3():
    return normalize_configuration(simplex_points(3, 3))


@pytest.fixture
def all14():
    return [tri(k) for k in range(14)]


# acceptance criteria report: criterion number -> (passed, detail)
ACCEPTANCE = {}


def record(number, passed, detail=""):
    ACCEPTANCE[number] = (bool(passed), detail)
    line = f"criterion {number}: {'PASS' if passed else 'FAIL'} {detail}".rstrip()
    print(line)
    assert passed, line


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'} {detail}".rstrip())
