import pytest

from heegaard_fill.homology import AbelianGroup, homology_group, smith_diagonal


@pytest.mark.parametrize("matrix, diag", [
    ([[2, 0], [0, 3]], [1, 6]),
    ([[2, 4], [6, 8]], [2, 4]),
    ([[0, 0], [0, 0]], []),
    ([[1, 2, 3]], [1]),
    ([[6], [10], [15]], [1]),
    ([[2, 0, 0], [0, 4, 0], [0, 0, 0]], [2, 4]),
])
def test_smith_diagonal(matrix, diag):
    assert smith_diagonal(matrix) == diag


def test_smith_diagonal_leaves_input_alone():
    m = [[4, 6], [6, 9]]
    smith_diagonal(m)
    assert m == [[4, 6], [6, 9]]


def test_divisibility_and_determinant(rng):
    for _ in range(200):
        n = rng.randint(1, 5)
        m = [[rng.randint(-6, 6) for _ in range(n)] for _ in range(n)]
        d = smith_diagonal(m)
        assert all(b % a == 0 for a, b in zip(d, d[1:]))
        if len(d) == n:
            prod = 1
            for x in d:
                prod *= x
            assert prod == abs(_det(m))


def _det(m):
    if len(m) == 1:
        return m[0][0]
    return sum((-1) ** j * m[0][j] * _det([row[:j] + row[j + 1:] for row in m[1:]])
               for j in range(len(m)))


def test_circle_homology():
    # one vertex, one loop edge
    assert homology_group([[0]], [[]], 1) == AbelianGroup(1)


@pytest.mark.parametrize("text, group", [
    ("0", AbelianGroup(0)),
    ("Z", AbelianGroup(1)),
    ("Z^2", AbelianGroup(2)),
    ("Z/3", AbelianGroup(0, (3,))),
    ("Z + Z/2 + Z/4", AbelianGroup(1, (2, 4))),
])
def test_group_text_round_trip(text, group):
    assert AbelianGroup.parse(text) == group
    assert str(group) == text


def test_group_rejects_bad_torsion():
    with pytest.raises(ValueError):
        AbelianGroup(0, (2, 3))
    with pytest.raises(ValueError):
        AbelianGroup(0, (1,))
