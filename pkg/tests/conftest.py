import sys
from pathlib import Path

import numpy as np
import pytest

from htlftir.spectra_io import Spectrum, YUnit

TESTS = Path(__file__).resolve().parent
FIXTURES = TESTS / "fixtures"
sys.path.insert(0, str(TESTS))


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


def absorbance(y, x=None, id="t") -> Spectrum:
    y = np.asarray(y, dtype=float)
    if x is None:
        x = 800.0 + 2.0 * np.arange(y.size)
    return Spectrum(id, x, y, YUnit.ABSORBANCE)


ACCEPTANCE_LOG: list[str] = []


def record_criterion(name: str, ok: bool, detail: str = "") -> None:
    line = f"{'PASS' if ok else 'FAIL'}  {name}" + (f"  ({detail})" if detail else "")
    ACCEPTANCE_LOG.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LOG:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LOG:
            terminalreporter.write_line(line)
