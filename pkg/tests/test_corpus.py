import time

import pytest

from cpx.scenario import corpus_names, corpus_text, load_scenario, run_all

REQUIRED = (
    "holiday_tan",
    "roof_replacement",
    "roof_conditioned",
    "roof_mixed",
    "roof_manipulation",
    "milk_theft",
    "late_meeting",
    "pigeon",
    "event_of_the_year",
)


def test_corpus_is_complete():
    assert set(REQUIRED) <= set(corpus_names())


@pytest.mark.parametrize("name", corpus_names())
def test_declared_queries_run_quickly(name):
    start = time.perf_counter()
    sc = load_scenario(corpus_text(name))
    tables = run_all(sc)
    elapsed = time.perf_counter() - start
    assert tables, "every bundled scenario declares at least one query"
    assert elapsed < 1.0, f"{name} took {elapsed:.3f}s"


def test_event_of_the_year_descriptions_are_equivalent(corpus):
    # two descriptions of the same event share a denotation; the wordier one is never chosen
    sc = corpus("event_of_the_year")
    c = sc.cascade()
    short = sc.message("the short circuit")
    long = sc.message("the most noteworthy event of the year")
    assert c.denotation(short) == c.denotation(long)
    for w in sc.k.ids:
        assert c.speaker_distribution(w)[long] == 0.0
