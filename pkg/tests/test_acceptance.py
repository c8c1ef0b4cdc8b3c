"""One test per acceptance criterion, at seed 42 and full instance counts.

Each test prints its criterion line; the lines are repeated in the pytest
terminal summary.
"""
import subprocess
import sys

import pytest

from frobase import acceptance

from conftest import ACCEPTANCE_LINES

SEED = 42


def check(result):
    line = result.line()
    ACCEPTANCE_LINES.append(line)
    print(line)
    failing = {k: v["failures"] for k, v in result.details.items() if isinstance(v, dict) and v.get("failures")}
    assert result.passed, failing or result.details


@pytest.mark.parametrize("k", range(1, 11), ids=lambda k: f"criterion_{k:02d}")
def test_criterion(k):
    check(getattr(acceptance, f"criterion_{k}")(SEED, "full"))


def test_criterion_11_selftest_is_byte_identical():
    cmd = [sys.executable, "-m", "frobase", "selftest", "--seed", str(SEED)]
    procs = [subprocess.Popen(cmd, stdout=subprocess.PIPE, stderr=subprocess.PIPE) for _ in range(2)]
    (out1, err1), (out2, err2) = (p.communicate(timeout=300) for p in procs)
    assert out1 and err1 == err2
    identical = out1 == out2
    check(acceptance.Result(11, "determinism", identical, {"bytes": len(out1)}))
