import pytest

from condfix.minilang import parse_program
from condfix.testkit import parse_suite

# Buggy gcd: the product comparison overflows for large operands.
GCD_BUGGY = """\
fn gcd(u: int, v: int) -> int {
  if (u * v == 0) {
    return absInt(u) + absInt(v);
  }
  let a: int = absInt(u);
  let b: int = absInt(v);
  while (b != 0) {
    let t: int = b;
    b = a % b;
    a = t;
  }
  return a;
}

fn absInt(x: int) -> int {
  if (x < 0) {
    return 0 - x;
  }
  return x;
}
"""

GCD_SUITE = """\
zero_u: gcd(0, 6) -> 6
coprime: gcd(3, 5) -> 1
overflow: gcd(4294967296, 4294967296) -> 4294967296
"""

PROBE_FIXTURE = """\
fn peek(n: int, s: Str) -> int {
  let doubled: int = n + n;
  return doubled;
}
"""


@pytest.fixture
def gcd_program():
    return parse_program(GCD_BUGGY)


@pytest.fixture
def gcd_suite():
    return parse_suite(GCD_SUITE)


@pytest.fixture
def probe_program():
    return parse_program(PROBE_FIXTURE)
