import json
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from soergelkit.coxeter import GeneralizedCartanMatrix, Realization, WeylGroup

CARTANS = {
    "a1": [[2]],
    "a2": [[2, -1], [-1, 2]],
    "b2": [[2, -1], [-2, 2]],
    "a3": [[2, -1, 0], [-1, 2, -1], [0, -1, 2]],
    "affine_a1": [[2, -2], [-2, 2]],
}

_REALS = {}
_GROUPS = {}


def realization(name) -> Realization:
    if name not in _REALS:
        _REALS[name] = Realization.minimal(GeneralizedCartanMatrix(CARTANS[name]))
    return _REALS[name]


def group(name) -> WeylGroup:
    # share groups with the bimodule engine's cache so element identity holds
    from soergelkit.bimod import _group_of
    if name not in _GROUPS:
        _GROUPS[name] = _group_of(realization(name))
    return _GROUPS[name]


@pytest.fixture(scope="session")
def a2_group():
    return group("a2")


@pytest.fixture(scope="session")
def b2_group():
    return group("b2")


@pytest.fixture(scope="session")
def affine_group():
    return group("affine_a1")


@pytest.fixture(scope="session")
def sl2_group():
    return group("a1")


@pytest.fixture()
def gcm_file(tmp_path):
    def make(name):
        path = tmp_path / f"{name}.json"
        path.write_text(json.dumps({"cartan": CARTANS[name]}))
        return str(path)
    return make
