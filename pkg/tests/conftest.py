import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from cscoop.compiler import compile_sources, initial_configuration  # noqa: E402
from cscoop.frontend import SourceUnit  # noqa: E402
from cscoop.semantics import Semantics  # noqa: E402


def compile_text(text: str, name: str = "t.cscoop", postconditions: bool = False):
    return compile_sources(SourceUnit(name, text), postconditions=postconditions)


def start(program, **kw):
    sem = Semantics(program, **kw)
    return sem, sem.stabilize(initial_configuration(program))


@pytest.fixture
def compile_src():
    return compile_text
