import pytest

from lazyasp import engine as engine_mod
from lazyasp.oracle import certify_generating

# every answer set emitted during the session is certified here
CERTIFIED = {"emitted": 0, "failures": []}


def _certifying(solve):
    def wrapper(self):
        for answer in solve(self):
            CERTIFIED["emitted"] += 1
            cert = certify_generating(None, answer.atoms, answer.log)
            if not cert.ok or not answer.mbt_empty:
                CERTIFIED["failures"].append((str(answer), cert))
                raise AssertionError(f"uncertified answer set {answer}: {cert}")
            yield answer

    return wrapper


@pytest.fixture(autouse=True, scope="session")
def certify_every_answer_set():
    original = engine_mod.Engine.solve
    engine_mod.Engine.solve = _certifying(original)
    yield CERTIFIED
    engine_mod.Engine.solve = original


# one line per acceptance criterion, collected by tests/test_acceptance.py
ACCEPTANCE = {}


def record_acceptance(number, ok, detail):
    line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE[number] = line
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for number in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[number])
    if CERTIFIED["emitted"]:
        terminalreporter.write_line(
            f"certification: {CERTIFIED['emitted']} answer sets emitted in this session, {len(CERTIFIED['failures'])} uncertified"
        )


def pytest_collection_modifyitems(items):
    # tests marked "last" see everything the rest of the session emitted
    items.sort(key=lambda item: item.get_closest_marker("last") is not None)
