"""Session configuration: quiet TensorFlow logs and summarize acceptance
outcomes at the end of the run."""
import os

# must land before the first keras/tensorflow import anywhere in the session
os.environ.setdefault("TF_CPP_MIN_LOG_LEVEL", "2")


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
