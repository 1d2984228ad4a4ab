import functools

import numpy as np
import pytest

from tlrefl.model import build_tl_data, fourier_model


@functools.lru_cache(maxsize=None)
def fourier_data(n: int, branch: str = "plus"):
    return build_tl_data(fourier_model(n, branch))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def crandn(rng, shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


# criterion number -> list of (case label, outcome) with outcome in {"pass", "fail", "xfail"}
ACCEPTANCE: dict[int, list[tuple[str, str]]] = {}


def record(criterion: int, case: str, ok) -> None:
    outcome = ok if isinstance(ok, str) else ("pass" if ok else "fail")
    ACCEPTANCE.setdefault(criterion, []).append((case, outcome))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for crit in sorted(ACCEPTANCE):
        cases = ACCEPTANCE[crit]
        failed = [c for c, o in cases if o == "fail"]
        xfailed = [c for c, o in cases if o == "xfail"]
        verdict = "FAIL" if failed else ("PARTIAL" if xfailed else "PASS")
        line = f"criterion {crit:>2}: {verdict}  {len(cases) - len(failed) - len(xfailed)}/{len(cases)} cases pass"
        if xfailed:
            line += f", {len(xfailed)} expected failure(s): {', '.join(xfailed)}"
        if failed:
            line += f"; failing: {', '.join(failed[:5])}"
        terminalreporter.write_line(line)
