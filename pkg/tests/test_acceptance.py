"""Acceptance gate: every criterion at its stated tolerance.

Criteria 1-10 are computed once per thread setting (1 and 4 workers) by
a session fixture; the individual tests assert the single-thread run and
print one pass/fail line each. Criterion 11 compares the two runs field
by field with timing stripped.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the lines.
"""

import json

import pytest

from acceptance_criteria import run_criteria, strip_runtime_fields


@pytest.fixture(scope="session")
def reports():
    return {threads: run_criteria(threads) for threads in (1, 4)}


def _check(report: dict) -> None:
    status = "PASS" if report["passed"] else "FAIL"
    line = (f"ACCEPTANCE {report['criterion']:>2} {status}  {report['name']}"
            f"  ({report['runtime_s']:.1f}s)")
    print(line)
    assert report["passed"], json.dumps(strip_runtime_fields(report), indent=2,
                                        default=str)


@pytest.mark.parametrize("index", range(10), ids=[f"criterion_{k+1:02d}"
                                                  for k in range(10)])
def test_criteria_1_through_10(reports, index):
    _check(reports[1]["criteria"][index])


def test_criterion_11_thread_determinism(reports):
    one = strip_runtime_fields(reports[1]["criteria"])
    four = strip_runtime_fields(reports[4]["criteria"])
    same = one == four
    print(f"ACCEPTANCE 11 {'PASS' if same else 'FAIL'}  "
          f"reports identical for LIPFREE_THREADS in {{1, 4}}")
    assert same, "reports differ between thread settings"
