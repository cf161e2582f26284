import warnings

import pytest
from hypothesis import HealthCheck, settings

from relhyp import validate_spec

settings.register_profile(
    "repo",
    derandomize=True,
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repo")

Z2Z3 = {
    "factors": [
        {"id": "A", "kind": "cyclic", "order": 2, "names": {"a": 1}},
        {"id": "B", "kind": "cyclic", "order": 3, "names": {"b": 1, "B": 2}},
    ]
}
ZFREE = {
    "factors": [
        {"id": "A", "kind": "Z", "names": {"a": 1, "A": -1}},
        {"id": "B", "kind": "Z", "names": {"b": 1, "B": -1}},
    ]
}
FREE_REL_A = {
    "generators": [["b", "B"]],
    "factors": [{"id": "A", "kind": "Z", "names": {"a": 1, "A": -1}}],
}
Z2_REL_X = {
    "backend": "presented",
    "generators": [["x", "X"], ["t", "T"]],
    "relators": ["x.t.X.T"],
    "factors": [{"id": "H", "kind": "Z", "embedding": "x"}],
}
Z2 = {"backend": "presented", "generators": [["x", "X"], ["t", "T"]], "relators": ["x.t.X.T"]}


def build(raw):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return validate_spec(raw)


@pytest.fixture(scope="session")
def z2z3():
    return build(Z2Z3)


@pytest.fixture(scope="session")
def zfree():
    return build(ZFREE)


@pytest.fixture(scope="session")
def free_rel_a():
    return build(FREE_REL_A)


@pytest.fixture(scope="session")
def z2_rel_x():
    return build(Z2_REL_X)


@pytest.fixture(scope="session")
def z2():
    return build(Z2)
