"""Acceptance battery: twelve criteria, each reported on its own line.

Criteria 1-11 run the shared battery once at full scale (seed 7) through a
module-scoped fixture; each test picks up its outcome and timing from there.
Criterion 12 exercises the installed CLI suite end to end.
"""

from __future__ import annotations

import json
import subprocess
import sys
import time

import pytest

from rulekit.battery import CRITERIA, SCALES

SEED = 7


def _line(num: int, label: str, ok: bool, extra: str) -> None:
    print(f"{'PASS' if ok else 'FAIL'} criterion {num:2d} ({label}): {extra}")


@pytest.fixture(scope="module")
def battery():
    """name -> (outcome, elapsed seconds of its criterion function)."""
    params = SCALES["full"]
    results = {}
    for name, fn in CRITERIA:
        started = time.perf_counter()
        try:
            outcomes = fn(params, SEED)
        except Exception as exc:  # keep later criteria running
            results[name] = (None, time.perf_counter() - started, repr(exc))
            continue
        elapsed = time.perf_counter() - started
        for outcome in outcomes:
            results[outcome.name] = (outcome, elapsed, None)
    return results


def _outcome(battery, name):
    if name not in battery:
        raise AssertionError(f"battery produced no outcome named {name!r}")
    outcome, elapsed, error = battery[name]
    if error is not None:
        raise AssertionError(f"criterion crashed: {error}")
    return outcome, elapsed


def test_criterion_01_majority_certified_blocks(battery):
    outcome, elapsed = _outcome(battery, "majority_certificates")
    ok = (
        outcome.ok
        and outcome.details["trials"] == 200
        and outcome.details["blocks"] == 500
        and outcome.details["shared"] == 50
        and outcome.details["min_certified"] >= 50
        and elapsed < 5.0
    )
    _line(1, "majority certificates", ok, f"{outcome.details}, {elapsed:.2f}s")
    assert outcome.ok, outcome.details
    assert outcome.details["min_certified"] >= 50
    assert elapsed < 5.0


def test_criterion_02_counting_dichotomy(battery):
    outcome, elapsed = _outcome(battery, "majority_counting_dichotomy")
    ok = outcome.ok and outcome.details["failures"] == 0
    _line(2, "counting dichotomy", ok, f"{outcome.details}")
    assert outcome.ok, outcome.details
    assert outcome.details["failures"] == 0


def test_criterion_03_pigeonhole_pairs(battery):
    outcome, elapsed = _outcome(battery, "pigeonhole_pairs")
    ok = (
        outcome.ok
        and outcome.details["failures"] == 0
        and outcome.details["cases"] >= 100_000
        and elapsed < 10.0
    )
    _line(3, "pigeonhole pairs", ok, f"{outcome.details}, {elapsed:.2f}s")
    assert outcome.ok, outcome.details
    assert outcome.details["cases"] >= 100_000
    assert elapsed < 10.0


def test_criterion_04_slalom_avoidance(battery):
    outcome, elapsed = _outcome(battery, "slalom_avoidance")
    ok = (
        outcome.ok
        and outcome.details["reals"] == 100
        and outcome.details["intervals"] == 12
        and outcome.details["failures"] == 0
        and elapsed < 5.0
    )
    _line(4, "slalom avoidance", ok, f"{outcome.details}, {elapsed:.2f}s")
    assert outcome.ok, outcome.details
    assert elapsed < 5.0


def test_criterion_05_evasion_transfer(battery):
    outcome, elapsed = _outcome(battery, "evasion_transfer_sweep")
    ok = (
        outcome.ok
        and outcome.details["rules"] == 50
        and outcome.details["reals"] == 4096
        and outcome.details["evasions"] > 0
        and outcome.details["failures"] == 0
        and elapsed < 10.0
    )
    _line(5, "evasion transfer", ok, f"{outcome.details}, {elapsed:.2f}s")
    assert outcome.ok, outcome.details
    assert outcome.details["failures"] == 0
    assert elapsed < 10.0


def test_criterion_06_one_rule_witness(battery):
    outcome, elapsed = _outcome(battery, "one_rule_witness_margin")
    ok = outcome.ok and outcome.details["trials"] == 100
    _line(6, "one-rule witness margin", ok, f"{outcome.details}")
    assert outcome.ok, outcome.details


def test_criterion_07_tree_escape(battery):
    outcome, elapsed = _outcome(battery, "tree_escape")
    ok = (
        outcome.ok
        and outcome.details["trees"] == 5
        and outcome.details["reals"] == 1000
        and outcome.details["failures"] == 0
    )
    _line(7, "tree escape", ok, f"{outcome.details}")
    assert outcome.ok, outcome.details
    assert min(outcome.details["blocks"].values()) >= 1


def test_criterion_08_avoid_probability(battery):
    outcome, elapsed = _outcome(battery, "avoid_probability_measure")
    ok = (
        outcome.ok
        and outcome.details["exact_failures"] == 0
        and outcome.details["mc_seeds"] == 50
        and outcome.details["mc_within"] >= 47
    )
    _line(8, "avoid probability", ok, f"{outcome.details}")
    assert outcome.ok, outcome.details
    assert outcome.details["mc_within"] >= 47


def test_criterion_09_splice_certification(battery):
    outcome, elapsed = _outcome(battery, "splice_certification")
    ok = (
        outcome.ok
        and outcome.details["widths"] == [2, 3, 4]
        and outcome.details["failures"] == 0
    )
    _line(9, "splice certification", ok, f"{outcome.details}")
    assert outcome.ok, outcome.details
    assert outcome.details["failures"] == 0


def test_criterion_10_support_chains(battery):
    outcome, elapsed = _outcome(battery, "support_chains")
    ok = (
        outcome.ok
        and outcome.details["pairs"] == 6
        and min(outcome.details["sizes"]) >= 64
        and outcome.details["failures"] == 0
    )
    _line(10, "support chains", ok, f"{outcome.details}")
    assert outcome.ok, outcome.details
    assert min(outcome.details["sizes"]) >= 64


def test_criterion_11_orbit_rules(battery):
    outcome, elapsed = _outcome(battery, "orbit_rules")
    ok = (
        outcome.ok
        and outcome.details["wanted"] == 20
        and min(outcome.details["blocks"]) >= 20
        and outcome.details["failures"] == 0
        and elapsed < 10.0
    )
    _line(11, "orbit rules", ok, f"{outcome.details}, {elapsed:.2f}s")
    assert outcome.ok, outcome.details
    assert min(outcome.details["blocks"]) >= 20
    assert elapsed < 10.0


def _run_suite(out_path):
    return subprocess.run(
        [
            sys.executable,
            "-c",
            "from rulekit.cli import run; run()",
            "suite",
            "--scale",
            "small",
            "--seed",
            "7",
            "--out",
            str(out_path),
        ],
        capture_output=True,
        text=True,
    )


def test_criterion_12_suite_determinism(tmp_path):
    started = time.perf_counter()
    first = _run_suite(tmp_path / "a.json")
    second = _run_suite(tmp_path / "b.json")
    elapsed = time.perf_counter() - started
    bytes_a = (tmp_path / "a.json").read_bytes()
    bytes_b = (tmp_path / "b.json").read_bytes()
    ok = (
        first.returncode == 0
        and second.returncode == 0
        and bytes_a == bytes_b
        and elapsed < 60.0
    )
    _line(12, "suite determinism", ok, f"two runs, {len(bytes_a)} bytes, {elapsed:.2f}s")
    assert first.returncode == 0, first.stderr
    assert second.returncode == 0, second.stderr
    assert bytes_a == bytes_b
    assert elapsed < 60.0
    report = json.loads(bytes_a)
    assert report["ok"] is True
    assert len(report["criteria"]) == 11
