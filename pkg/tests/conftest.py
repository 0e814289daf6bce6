from pathlib import Path

import pytest

from idxcost import kernel
from idxcost.labelling import label_indexed
from idxcost.textio import parse_stmt
from idxcost.transform import apply_script, parse_script

PROGRAMS = Path(__file__).resolve().parent.parent / "programs"


@pytest.fixture(scope="session")
def factorial_text():
    return (PROGRAMS / "factorial_sum.imp").read_text()


@pytest.fixture(scope="session")
def peel_unroll_script():
    return parse_script((PROGRAMS / "peel_unroll.script").read_text())


@pytest.fixture(scope="session")
def labelled(factorial_text):
    return label_indexed(parse_stmt(factorial_text))


@pytest.fixture(scope="session")
def transformed(labelled, peel_unroll_script):
    return apply_script(labelled, peel_unroll_script)


@pytest.fixture(params=sorted(kernel.available()))
def kern(request):
    return kernel.get(request.param)
