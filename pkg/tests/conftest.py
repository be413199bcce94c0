"""Shared fixtures: a hard no-network guard and the acceptance summary."""

from __future__ import annotations

import socket
import time

import pytest

_real_connect = socket.socket.connect
_acceptance_results: list[tuple[str, bool]] = []
_session_start = time.monotonic()


def _blocked_connect(self, address):
    raise RuntimeError(f"network access is disabled in tests (attempted {address!r})")


@pytest.fixture(autouse=True, scope="session")
def no_network():
    socket.socket.connect = _blocked_connect
    try:
        yield
    finally:
        socket.socket.connect = _real_connect


def network_guard_active() -> bool:
    return socket.socket.connect is _blocked_connect


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    if report.when == "call" and item.module.__name__ == "test_acceptance":
        _acceptance_results.append((item.name, report.passed))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _acceptance_results:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed in sorted(_acceptance_results):
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {name}")
    elapsed = time.monotonic() - _session_start
    terminalreporter.write_line(f"suite wall time: {elapsed:.1f}s")
