import pytest

from algentropy.factors.tracker import track_factors
from algentropy.maps.projective import load_map
from algentropy.reference import load_reference, map_path


@pytest.fixture(scope="session")
def hv_map():
    return load_map(map_path("hv"))


@pytest.fixture(scope="session")
def f4_map():
    return load_map(map_path("f4"))


@pytest.fixture(scope="session")
def hv_ref():
    return load_reference("hv")


@pytest.fixture(scope="session")
def f4_ref():
    return load_reference("f4")


@pytest.fixture(scope="session")
def relations():
    return load_reference("relations")


@pytest.fixture(scope="session")
def hv_line_track(hv_map):
    return track_factors(hv_map, 12, mode="line")


@pytest.fixture(scope="session")
def hv_exact_track(hv_map):
    # seven iterates is as deep as symbolic tracking goes in reasonable time
    return track_factors(hv_map, 7, mode="exact")


@pytest.fixture(scope="session")
def f4_line_track(f4_map):
    return track_factors(f4_map, 40, mode="line")


@pytest.fixture(scope="session")
def gf4_ref():
    return load_reference("gf_4d")


# one PASS/FAIL line per acceptance criterion, repeated in the terminal summary
ACCEPTANCE: dict = {}


def record(label: str, ok: bool, detail: str = "") -> bool:
    line = f"criterion {label}: {'PASS' if ok else 'FAIL'}" + (f"  ({detail})" if detail else "")
    ACCEPTANCE[label] = line
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(ACCEPTANCE, key=lambda s: (len(s), s)):
        terminalreporter.write_line(ACCEPTANCE[label])
