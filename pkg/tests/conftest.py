import pytest

from hiertax import build_hierarchy, kzis_structure_codes


@pytest.fixture(scope="session")
def fig1_tree():
    """Two-level tree with 8 classes: branches (0) and (1), three leaves each."""
    return build_hierarchy(["00", "01", "02", "10", "11", "12"], (1, 1))


@pytest.fixture(scope="session")
def kzis_tree():
    return build_hierarchy(kzis_structure_codes(), (1, 1, 1, 1, 2))
