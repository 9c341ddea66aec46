from pathlib import Path

import pytest

from tmw import parse_graph

GRAPHS = Path(__file__).resolve().parent.parent / "graphs"


def load(name: str):
    return parse_graph((GRAPHS / name).read_text())


@pytest.fixture(scope="session")
def graphs():
    """Named fixture graphs from the repository's ``graphs/`` directory."""
    return {p.stem: parse_graph(p.read_text()) for p in GRAPHS.glob("*.txt")}


ACCEPTANCE_LINES: list[str] = []


def record(criterion: int, ok: bool, detail: str) -> None:
    ACCEPTANCE_LINES.append(f"criterion {criterion:>2}: {'PASS' if ok else 'FAIL'}  {detail}")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split(":")[0].split()[1])):
            terminalreporter.write_line(line)
