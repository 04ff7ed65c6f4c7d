from __future__ import annotations

import pytest

from pdspectrum.bands import contained
from pdspectrum.covering import find_entry
from pdspectrum.symbolic import SUCCESSORS, admissible_words, compare_words, pi_star


@pytest.mark.parametrize("lam", ["0.2", "2", "4"])
def test_evolution_suite(lam, tables_for, coverings_for):
    from pdspectrum.covering import verify_evolution

    covs = coverings_for(lam, 9)
    rep = verify_evolution(covs, tables_for(lam, 10))
    assert rep.ok, rep.summary()


@pytest.mark.parametrize("lam", ["0.5", "2"])
def test_entries_are_the_admissible_words(lam, coverings_for):
    """Numeric coverings against words enumerated from the type graph alone."""
    for cov in coverings_for(lam, 8):
        words = sorted(admissible_words(cov.level), key=lambda w: pi_star(w))
        got = sorted((e.word for e in cov.entries), key=lambda w: pi_star(w))
        assert got == words
        for e in cov.entries:
            assert pi_star(e.word) == e.code
            assert e.type == e.word[-1]


def test_first_coverings(coverings_for):
    c0, c1 = coverings_for("2", 1)
    assert [(e.code, e.type) for e in c0] == [("0", "3_el"), ("", "0_e")]
    assert [(e.code, e.type) for e in c1] == [("0", "0_o"), ("01", "3_ol"), ("1", "1_o"), ("11", "3_or")]


def test_children_follow_graph_edges_and_nest(coverings_for):
    covs = coverings_for("2", 7)
    for cov, nxt in zip(covs, covs[1:]):
        for e in cov.entries:
            kids = [find_entry(nxt, e.word + (s,)) for s in SUCCESSORS[e.type]]
            assert all(k is not None for k in kids)
            assert all(contained(k.band, e.band) for k in kids)


def test_entries_ordered_like_words(coverings_for):
    for cov in coverings_for("4", 7):
        words = [e.word for e in cov.entries]
        assert all(compare_words(u, v) < 0 for u, v in zip(words, words[1:]))
