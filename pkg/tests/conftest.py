import json
import subprocess
import sys

import pytest

_CRITERIA: dict[int, tuple[bool, str]] = {}


def run_cli(*args: str) -> tuple[int, dict | None, str]:
    """Run the CLI in a subprocess; return (exit code, parsed stdout JSON, stderr)."""
    proc = subprocess.run(
        [sys.executable, "-m", "logistic_grn.cli", *args], capture_output=True, text=True, timeout=120
    )
    try:
        payload = json.loads(proc.stdout) if proc.stdout.strip() else None
    except json.JSONDecodeError:
        payload = None
    return proc.returncode, payload, proc.stderr


@pytest.fixture
def criterion():
    """Record one acceptance criterion's verdict, then assert it."""

    def record(number: int, checks: dict[str, bool], detail: str) -> None:
        ok = all(checks.values())
        failed = [k for k, v in checks.items() if not v]
        note = detail if ok else f"{detail}; failed: {', '.join(failed)}"
        _CRITERIA[number] = (ok, note)
        assert ok, note

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        ok, note = _CRITERIA[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {note}")
