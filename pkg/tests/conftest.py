import json
import pathlib

import numpy as np
import pytest
from hypothesis import HealthCheck, settings, strategies as st

from sparse_ctrb import SystemModel

settings.register_profile(
    "suite",
    max_examples=40,
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much],
)
settings.load_profile("suite")

FIXTURES = pathlib.Path(__file__).resolve().parent.parent / "fixtures"


def load_fixture(name: str) -> SystemModel:
    with open(FIXTURES / f"{name}.json", encoding="utf-8") as fh:
        data = json.load(fh)
    return SystemModel(
        D=np.array(data["D"], dtype=float),
        H=np.array(data["H"], dtype=float),
        A=np.array(data["A"], dtype=float) if "A" in data else None,
    )


@pytest.fixture(scope="session")
def inequality_blocked():
    return load_fixture("inequality-blocked")


@pytest.fixture(scope="session")
def no_common_support():
    return load_fixture("no-common-support")


@pytest.fixture(scope="session")
def nilpotent_chain():
    return load_fixture("nilpotent-chain")


@pytest.fixture(scope="session")
def output_blocked():
    return load_fixture("output-blocked")


@pytest.fixture(scope="session")
def output_reachable():
    return load_fixture("output-reachable")


@pytest.fixture(scope="session")
def standard_form_reference():
    return load_fixture("standard-form-reference")


def int_matrix(rows, cols, lo=-1, hi=1):
    """Strategy for a rows x cols integer-entried float matrix."""
    return st.lists(
        st.lists(st.integers(lo, hi), min_size=cols, max_size=cols),
        min_size=rows,
        max_size=rows,
    ).map(lambda rows_: np.array(rows_, dtype=float))


@st.composite
def small_systems(draw, max_n=3, max_l=3, lo=-1, hi=1, with_output=False):
    """Random small integer systems; H is never all-zero columns-free."""
    n = draw(st.integers(2, max_n))
    l = draw(st.integers(1, max_l))
    d = draw(int_matrix(n, n, lo, hi))
    h = draw(int_matrix(n, l, lo, hi))
    a = None
    if with_output:
        m = draw(st.integers(1, n - 1))
        a = draw(int_matrix(m, n, lo, hi))
    return SystemModel(D=d, H=h, A=a)


@st.composite
def invertible_matrices(draw, n, lo=-2, hi=2, max_cond=1e6):
    m = draw(int_matrix(n, n, lo, hi))
    from hypothesis import assume

    assume(abs(np.linalg.det(m)) > 1e-9)
    assume(np.linalg.cond(m) < max_cond)
    return m
