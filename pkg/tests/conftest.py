import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=100)
settings.load_profile("default")


@pytest.fixture(scope="session")
def acceptance_log(request):
    lines = request.config.stash.setdefault(_LINES, [])

    def log(criterion, ok, detail):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {criterion}: {detail}"
        lines.append(line)
        print(line)

    return log


_LINES = pytest.StashKey[list]()


def _order(line):
    label = line.split("criterion ")[1].split(":")[0]
    return (0, int(label)) if label.isdigit() else (1, 0)


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_LINES, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=_order):
            terminalreporter.write_line(line)
