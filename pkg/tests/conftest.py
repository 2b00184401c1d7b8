import pytest

from kcswitch.corpus import Category, Chart, Gender
from kcswitch.synthetic import make_song

_ACCEPTANCE = []


def record(criterion, passed, detail=""):
    _ACCEPTANCE.append((criterion, bool(passed), detail))
    return passed


@pytest.fixture
def acceptance():
    return record


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, passed, detail in _ACCEPTANCE:
        line = f"[{'PASS' if passed else 'FAIL'}] {criterion}"
        if detail:
            line += f": {detail}"
        terminalreporter.write_line(line)


@pytest.fixture
def song():
    def build(lyrics, gender=Gender.F, category=Category.GROUP, chart=Chart.HOT100, title=None):
        return make_song(title or lyrics[:20] or "empty", lyrics, gender, category, chart)
    return build
