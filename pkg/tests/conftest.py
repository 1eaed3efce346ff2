import sys
from pathlib import Path

import pytest

from iospec import (
    AllVar,
    Apply,
    Branch,
    Exit,
    IntConst,
    Integers,
    ReadInput,
    Spec,
    TillExit,
    parse_spec,
)

TESTS_DIR = Path(__file__).parent
DATA_DIR = TESTS_DIR / "data"
FIXTURES_DIR = TESTS_DIR / "fixtures"

# Reads n, then n more integers, may announce the remaining count before
# each read, and finally prints the sum.
SUM_SPEC_TEXT = """\
read n : nats
loop {
  if len(x_A) == n_C then {
    exit
  } else {
    write { eps, n_C - len(x_A) }
    read x : ints
  }
}
write { sum(x_A) }
"""

# Same task without the optional progress output.
SUM_SPEC_PLAIN_TEXT = """\
read n : nats
loop {
  if len(x_A) == n_C then {
    exit
  } else {
    read x : ints
  }
}
write { sum(x_A) }
"""


# A loop that only ends once the input history sums to an unhittable
# constant; random generation is expected to get stuck on it.
STUCK_SPEC = Spec((
    TillExit(Spec((
        Branch(
            Apply("==", (Apply("sum", (AllVar("x"),)), IntConst(10000))),
            Spec((ReadInput("x", Integers()),)),
            Spec((Exit(),)),
        ),
    ))),
))


@pytest.fixture(scope="session")
def sum_spec():
    return parse_spec(SUM_SPEC_TEXT)


@pytest.fixture(scope="session")
def sum_spec_plain():
    return parse_spec(SUM_SPEC_PLAIN_TEXT)


def fixture_command(name: str) -> tuple[str, ...]:
    """Command line running a Python fixture program from tests/fixtures."""
    return (sys.executable, str(FIXTURES_DIR / name))
