"""Smoke test for the `pba` extension module.

Build and install first:  pip install --no-build-isolation ./crates/python
Run with:                 python -m pytest python/smoke_test.py
"""

from pathlib import Path

import pytest

import pba

FIXTURE = Path(__file__).resolve().parent.parent / "crates/cli/tests/data/small.data"


@pytest.fixture(scope="module")
def engine():
    return pba.Engine.from_file(str(FIXTURE))


def test_module_surface():
    assert pba.__version__
    assert pba.levenshtein("kitten", "sitting") == 3
    pairs = pba.parse_nettalk("cat\tk@t\t0<>\t1\n; comment\nbad line\n")
    assert pairs == [("cat", "k@t")]


def test_pronounce_that(engine):
    ranked = engine.pronounce("that", strategy="PROB", leave_one_out=True)
    assert ranked[0][0] == "D-@t"
    # the three two-segment splits of #that# with that held out
    expected = (2 / 9) * (1 / 3) + (2 / 4) * (8 / 9) + (1 / 2) * (14 / 15)
    assert ranked[0][1] == pytest.approx(expected, rel=1e-9)
    assert [s for _, s in ranked] == sorted((s for _, s in ranked), reverse=True)


def test_errors(engine):
    with pytest.raises(ValueError):
        engine.pronounce("xyz")
    with pytest.raises(ValueError):
        engine.pronounce("ccc")
    with pytest.raises(ValueError):
        engine.pronounce("that", strategy="NOPE")
    with pytest.raises(ValueError):
        pba.Engine("")


def test_evaluate_and_bounds(engine):
    r = engine.evaluate(strategy="PROB")
    assert r["mode"] == "nonoverlap"
    assert r["words"] == len(engine)
    assert 0.0 <= r["word_accuracy"] <= 100.0
    lo, hi = engine.bounds()
    assert lo["word_accuracy"] <= hi["word_accuracy"]
    assert engine.evaluate(jobs=1) == engine.evaluate(jobs=4)
