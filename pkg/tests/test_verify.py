from __future__ import annotations

from slc_lab.verify import CHECKS, run_all


def test_all_checks_pass():
    results = run_all(seed=0)
    assert len(results) == len(CHECKS)
    failed = [f"{c.name}: {c.detail}" for c in results if not c.passed]
    assert not failed, failed


def test_deterministic():
    a = [c.detail for c in run_all(seed=3)]
    b = [c.detail for c in run_all(seed=3)]
    assert a == b
