from fractions import Fraction

import pytest

from divstable import validate_instance


def bipartite(firms, workers, edges):
    """firms/workers: {id: quota}; edges: [(id, f, w, cap)]."""
    return validate_instance({
        "kind": "bipartite",
        "vertices": [{"id": f, "side": "F", "quota": str(q)} for f, q in firms.items()]
        + [{"id": w, "side": "W", "quota": str(q)} for w, q in workers.items()],
        "edges": [{"id": e, "ends": [f, w], "capacity": str(b)} for e, f, w, b in edges],
    })


def graph(quotas, edges, kind="graph"):
    """quotas: {id: quota}; edges: [(id, ends, cap)]."""
    return validate_instance({
        "kind": kind,
        "vertices": [{"id": v, "quota": str(q)} for v, q in quotas.items()],
        "edges": [{"id": e, "ends": list(ends), "capacity": str(b)} for e, ends, b in edges],
    })


@pytest.fixture
def triangle():
    return graph({"a": 3, "b": 3, "c": 3},
                 [("ab", "ab", 2), ("bc", "bc", 2), ("ca", "ca", 2)])


@pytest.fixture
def star():
    return bipartite({"f1": 6}, {"w1": 10, "w2": 10, "w3": 10},
                     [("e1", "f1", "w1", 4), ("e2", "f1", "w2", 4), ("e3", "f1", "w3", 1)])


@pytest.fixture
def two_firms():
    return bipartite({"f1": 2, "f2": 2}, {"w1": 3},
                     [("e1", "f1", "w1", 2), ("e2", "f2", "w1", 2)])


@pytest.fixture
def single_edge():
    return bipartite({"u": 3}, {"v": 10}, [("e", "u", "v", 5)])


F = Fraction


ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance():
    """Record one pass/fail line per acceptance criterion."""

    def record(number, title, ok, detail):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title} ({detail})"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
