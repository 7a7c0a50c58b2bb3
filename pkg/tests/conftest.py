import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from fsaism.sparse_core import SparseMatrix  # noqa: E402

# criterion id -> (passed, detail); filled by test_acceptance
ACCEPTANCE_RESULTS = {}

# The 3x3 matrix of the worked (1,2)-inverse example, printed there to four
# decimals; its exact entries are 2/3, 1/3, 1/4, 1/2, 2/5, 4/5 (rows sum to 0).
EXAMPLE_47 = np.array([[2 / 3, -1 / 3, -1 / 3],
                       [-1 / 4, 1 / 2, -1 / 4],
                       [-2 / 5, -2 / 5, 4 / 5]])
EXAMPLE_47_PRINTED = np.array([[0.6667, -0.3333, -0.3333],
                               [-0.2500, 0.5000, -0.2500],
                               [-0.4000, -0.4000, 0.8000]])
BREAKDOWN_2X2 = np.array([[3.0, -3.0], [-3.0, 3.0]])


@pytest.fixture
def a47():
    return SparseMatrix.from_dense(EXAMPLE_47)


@pytest.fixture
def a31():
    return SparseMatrix.from_dense(BREAKDOWN_2X2)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for cid in sorted(ACCEPTANCE_RESULTS, key=lambda c: int(c[2:])):
        ok, detail = ACCEPTANCE_RESULTS[cid]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {cid}  {detail}")
