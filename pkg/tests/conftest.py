"""Session fixtures over the synthetic source trees, plus the acceptance
roll-call hook. Plain helpers live in benchutil.py."""
from __future__ import annotations

from pathlib import Path

import pytest

from benchutil import full_ham_rows, full_ph2_cases, write_ham_fixture, write_ph2_fixture
from dermbench.dataset import ManifestRecord, ingest_ham10000, ingest_ph2, merge_manifests


@pytest.fixture(scope="session")
def ham_tree(tmp_path_factory) -> tuple[Path, Path]:
    root = tmp_path_factory.mktemp("ham_full")
    return write_ham_fixture(root, full_ham_rows())


@pytest.fixture(scope="session")
def ph2_tree(tmp_path_factory) -> tuple[Path, Path]:
    root = tmp_path_factory.mktemp("ph2_full")
    return write_ph2_fixture(root, full_ph2_cases())


@pytest.fixture(scope="session")
def full_manifest(ham_tree, ph2_tree) -> list[ManifestRecord]:
    ham = ingest_ham10000(*ham_tree)
    ph2 = ingest_ph2(*ph2_tree)
    return merge_manifests(ham, ph2)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One PASS/FAIL line per acceptance criterion at the end of the run.

    Guarded so that a run collecting several test trees prints the roll
    call once.
    """
    if getattr(config, "_acceptance_rollcall_done", False):
        return
    config._acceptance_rollcall_done = True
    reports = terminalreporter.getreports("passed") + terminalreporter.getreports("failed")
    acceptance = [r for r in reports if "test_acceptance" in r.nodeid and r.when == "call"]
    if not acceptance:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for r in sorted(acceptance, key=lambda r: r.nodeid):
        status = "PASS" if r.passed else "FAIL"
        name = r.nodeid.split("::")[-1]
        terminalreporter.write_line(f"[{status}] {name}")
