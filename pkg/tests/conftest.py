import sys

import pytest

from texturespace.synthesis import build_texture_set, synthesize_texture


def pytest_terminal_summary(terminalreporter):
    """One line per acceptance criterion, after the test output."""
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "RESULTS", []) if module else []
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for line in lines:
        terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def default_set():
    return build_texture_set()


@pytest.fixture(scope="session")
def rendered_set(default_set):
    """All 24 default textures, rendered once and shared across tests."""
    return {
        tid: synthesize_texture(params, seed=default_set.seed_for(tid))
        for tid, params in default_set.entries
    }
