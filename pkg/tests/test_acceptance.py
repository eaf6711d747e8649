"""The ten acceptance criteria, each at its stated size and tolerance.

Every preset runs once into a shared directory; the determinism criterion
reruns all of them and compares CSV digests against that first run.
Deselect with ``-m "not acceptance"`` for a quick unit run.
"""

import pytest

from conftest import ACCEPTANCE_LINES
from vclab.criteria import CRITERIA, csv_digests, run_criterion
from vclab.seeding import DEFAULT_SEED

pytestmark = pytest.mark.acceptance
IDS = [cid for cid in CRITERIA if cid != "determinism"]


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    return tmp_path_factory.mktemp("acceptance")


@pytest.fixture(scope="module")
def first_digests():
    return {}


def _report(res, capsys):
    ACCEPTANCE_LINES.append(res.line())
    with capsys.disabled():
        print("\n" + res.line())


@pytest.mark.parametrize("cid", IDS)
def test_criterion(cid, workdir, first_digests, capsys):
    out = workdir / f"{cid}_a"
    res = run_criterion(cid, DEFAULT_SEED, out)
    first_digests[cid] = csv_digests(out)
    _report(res, capsys)
    assert res.passed, res.metrics


def test_determinism(workdir, first_digests, capsys):
    res = run_criterion("determinism", DEFAULT_SEED, workdir, first=first_digests)
    _report(res, capsys)
    assert res.passed, res.metrics["differing"]
