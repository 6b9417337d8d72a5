import numpy as np
import pytest

from mposym.errors import InputError
from mposym.groups import FiniteGroup


@pytest.mark.parametrize("n", [1, 2, 3, 5])
def test_cyclic_inverses(n):
    G = FiniteGroup.cyclic(n)
    assert G.order == n
    assert G.is_abelian()
    for g in range(n):
        assert G.mul(g, G.inv(g)) == 0


def test_direct_product_of_two_z2():
    G = FiniteGroup.direct_product(FiniteGroup.cyclic(2), FiniteGroup.cyclic(2))
    assert G.order == 4
    assert all(G.mul(g, g) == 0 for g in range(4))
    assert G.labels[3] == "(1,1)"


def test_rejects_non_group_tables():
    with pytest.raises(InputError):
        FiniteGroup(np.array([[0, 1], [1, 1]]))
    with pytest.raises(InputError):
        FiniteGroup(np.array([[1, 0], [0, 1]]))


def test_rejects_wrong_label_count():
    with pytest.raises(InputError):
        FiniteGroup(np.array([[0, 1], [1, 0]]), ("e",))
