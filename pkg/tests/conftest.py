import os
import sys
from importlib import resources

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from autogrp.alphabet import Alphabet
from autogrp.autostructure import autstructure
from autogrp.cosets import SubgroupData, build_coset_system
from autogrp.fsaio import read_group
from autogrp.hnn import HnnInput
from autogrp.rewriting import Presentation

DATA = str(resources.files("autogrp").joinpath("data"))


def data_path(name):
    return os.path.join(DATA, name)


@pytest.fixture(scope="session")
def f2():
    return read_group(data_path("f2.grp"))


@pytest.fixture(scope="session")
def z2():
    return read_group(data_path("z2.grp"))


@pytest.fixture(scope="session")
def s3():
    return read_group(data_path("s3.grp"))


@pytest.fixture(scope="session")
def f2_structure(f2):
    return autstructure(f2)


@pytest.fixture(scope="session")
def z2_structure(z2):
    return autstructure(z2)


@pytest.fixture(scope="session")
def f2_cyclic_cosets(f2):
    """F2 with H = <a>."""
    return build_coset_system(f2, SubgroupData(f2.alphabet, ["a"]))


@pytest.fixture(scope="session")
def f2_index2_cosets(f2):
    return build_coset_system(f2, SubgroupData(f2.alphabet, ["a", "bb", "baB"]))


@pytest.fixture(scope="session")
def toy_k(f2_cyclic_cosets):
    """K = <a, b, z | za = az>."""
    return HnnInput(f2_cyclic_cosets)


@pytest.fixture(scope="session")
def swap_k():
    """G = F2 ordered b B a A, H = <a, baBB>, alpha swapping the generators."""
    A = Alphabet("bBaA", {"a": "A", "b": "B"})
    cs = build_coset_system(Presentation(A, []), SubgroupData(A, ["a", "baBB"]))
    return HnnInput(cs, {"y1": "y2", "y2": "y1"})
