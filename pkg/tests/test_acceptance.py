"""The twelve acceptance criteria at their stated tolerances.

Each test prints one ``[PASS]``/``[FAIL]`` line; the lines are repeated in a
summary section at the end of the pytest run.  The Monte-Carlo criteria take
several minutes in total.
"""

import pytest

from siegel_lab.acceptance import CRITERIA


# the Monte-Carlo criteria (8 to 12) are marked slow
PARAMS = [pytest.param(c, id=f"{c.number:02d}-{c.__name__[10:]}", marks=[pytest.mark.slow] if c.number >= 8 else [])
          for c in CRITERIA]


@pytest.mark.parametrize("criterion", PARAMS)
def test_criterion(criterion, acceptance_log):
    res = criterion()
    line = res.line()
    print(line)
    acceptance_log.append(line)
    assert res.passed, line
