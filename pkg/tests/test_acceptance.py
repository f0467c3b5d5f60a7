"""The ten acceptance criteria, one test each.

Every test prints a single ``[PASS]``/``[FAIL]`` line, bypassing output
capture so it shows in a plain ``pytest -v`` run, and asserts the criterion in full,
including its time budget. ``lpwave suite`` runs the same battery.
"""

import pytest

from lpwave import acceptance


@pytest.mark.parametrize("number", range(1, 11))
def test_criterion(number, capsys):
    res = acceptance.CRITERIA[number - 1]()
    with capsys.disabled():
        print("\n" + res.line())
    assert res.number == number
    assert res.passed, res.line()
