"""Average-precision protocol: hand values, properties, CSV emission."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mvsearch.errors import EmptyInputError, ListTooShortError, SpecInvalidError
from mvsearch.eval import (
    PrecisionCurve,
    QueryCase,
    RelevanceJudgment,
    ave_p,
    ave_p_from_flags,
    emit_csv,
    mean_ave_p,
    precision_curve,
    read_csv,
    store_categories,
)
from mvsearch.fusion import ResultEntry
from mvsearch.index import QuerySpec

from conftest import make_store


def ref_ave_p(flags, n):
    """Direct transcription of the definition: mean over ranks of P(k)*rel(k)."""
    total = 0.0
    hits = 0
    for k in range(1, n + 1):
        if flags[k - 1]:
            hits += 1
            total += hits / k
    return total / n


# ---------------------------------------------------------------------------
# hand values


def test_all_relevant_is_one():
    assert ave_p_from_flags([True] * 5, 5) == pytest.approx(1.0)


def test_none_relevant_is_zero():
    assert ave_p_from_flags([False] * 5, 5) == 0.0


def test_hand_value_two_hits_in_five():
    # relevant at ranks 1 and 3: (1/1 + 2/3) / 5 = 1/3
    flags = [True, False, True, False, False]
    assert ave_p_from_flags(flags, 5) == pytest.approx(1.0 / 3.0)


def test_single_hit_positions():
    # a lone hit at rank r contributes (1/r)/n
    for r in range(1, 6):
        flags = [i == r - 1 for i in range(5)]
        assert ave_p_from_flags(flags, 5) == pytest.approx((1.0 / r) / 5.0)


def test_standard_variant_divides_by_relevant_count():
    flags = [True, False, True, False, False]
    # standard AveP: (1 + 2/3) / 2 = 5/6
    assert ave_p_from_flags(flags, 5, standard=True) == pytest.approx(5.0 / 6.0)
    # with an explicit universe count larger than n, denominator is min(n, total)
    assert ave_p_from_flags(flags, 5, standard=True, total_relevant=7) == pytest.approx(
        (1.0 + 2.0 / 3.0) / 5.0
    )
    assert ave_p_from_flags([False] * 3, 3, standard=True) == 0.0


def test_list_too_short():
    with pytest.raises(ListTooShortError):
        ave_p_from_flags([True, False], 3)


# ---------------------------------------------------------------------------
# properties


@settings(max_examples=200)
@given(st.lists(st.booleans(), min_size=1, max_size=30))
def test_matches_reference_and_bounds(flags):
    n = len(flags)
    got = ave_p_from_flags(flags, n)
    assert got == pytest.approx(ref_ave_p(flags, n))
    assert 0.0 <= got <= 1.0


def test_promoting_a_hit_never_decreases():
    rng = np.random.default_rng(3)
    for _ in range(200):
        flags = rng.random(10) < 0.4
        flags = list(flags)
        lows = [i for i in range(1, 10) if flags[i] and not flags[i - 1]]
        if not lows:
            continue
        i = lows[0]
        swapped = flags.copy()
        swapped[i - 1], swapped[i] = swapped[i], swapped[i - 1]
        assert ave_p_from_flags(swapped, 10) >= ave_p_from_flags(flags, 10)


def test_prefix_consistency():
    flags = [True, True, False, True, False, False]
    for n in range(1, len(flags) + 1):
        assert ave_p_from_flags(flags, n) == pytest.approx(ref_ave_p(flags, n))


# ---------------------------------------------------------------------------
# result-list wrapper


def test_ave_p_on_result_entries():
    results = [
        ResultEntry("a", 0.9),
        ResultEntry("b", 0.8),
        ResultEntry("c", 0.7),
        ResultEntry("d", 0.6),
    ]
    cats = {"a": "cup", "b": "shoe", "c": "cup", "d": "shoe"}
    judge = RelevanceJudgment(query_id="q", category="cup")
    # hits at ranks 1 and 3: (1 + 2/3) / 4
    assert ave_p(results, judge, 4, cats) == pytest.approx((1.0 + 2.0 / 3.0) / 4.0)
    with pytest.raises(ListTooShortError):
        ave_p(results, judge, 5, cats)


def test_ave_p_standard_counts_relevant_in_universe():
    results = [ResultEntry("a", 0.9), ResultEntry("b", 0.8)]
    cats = {"a": "cup", "b": "shoe", "c": "cup", "d": "cup"}
    judge = RelevanceJudgment(query_id="q", category="cup")
    # 3 relevant objects exist but n=2, so denominator is min(2, 3) = 2
    assert ave_p(results, judge, 2, cats, standard=True) == pytest.approx(0.5)


# ---------------------------------------------------------------------------
# store-level aggregation


def _cases_from_store(store, m=1):
    """Each object's own view histograms as a query of its category."""
    cases = []
    for rec in store.records:
        hists = np.stack(
            [v.histogram.astype(np.float64) for v in rec.views[:m]]
        )
        cases.append(
            QueryCase(query_id=f"q-{rec.object_id}", category=rec.category, hists=hists)
        )
    return cases


def test_mean_ave_p_self_queries_hand_value(small_store):
    cases = _cases_from_store(small_store)
    template = QuerySpec(
        hists=np.zeros((1, small_store.bins)), similarity="nhi", fusion="none"
    )
    n = len(small_store.records)
    score = mean_ave_p(cases, small_store, template, n)
    # Each self view scores 1.0 and every other object scores 0.0, so the
    # ranking is [self, rest ascending by id]. With categories cat0/cat1
    # alternating over obj00..obj03 the four per-query AveP values are:
    #   obj00: hits at 1,3 -> (1 + 2/3)/4      obj01: hits at 1,4 -> (1 + 2/4)/4
    #   obj02: hits at 1,2 -> (1 + 2/2)/4      obj03: hits at 1,3 -> (1 + 2/3)/4
    want = np.mean(
        [(1 + 2 / 3) / 4, (1 + 2 / 4) / 4, (1 + 2 / 2) / 4, (1 + 2 / 3) / 4]
    )
    assert score == pytest.approx(want)


def test_mean_ave_p_is_mean_of_single_cases(small_store):
    cases = _cases_from_store(small_store)
    template = QuerySpec(
        hists=np.zeros((1, small_store.bins)), similarity="nc", fusion="none"
    )
    n = 3
    per = [mean_ave_p([c], small_store, template, n) for c in cases]
    combined = mean_ave_p(cases, small_store, template, n)
    assert combined == pytest.approx(float(np.mean(per)))


def test_mean_ave_p_empty_cases(small_store):
    template = QuerySpec(
        hists=np.zeros((1, small_store.bins)), similarity="nc", fusion="none"
    )
    with pytest.raises(EmptyInputError):
        mean_ave_p([], small_store, template, 2)


def test_precision_curve_shape_and_prefix(small_store):
    cases = _cases_from_store(small_store, m=2)
    template = QuerySpec(
        hists=np.zeros((2, small_store.bins)), similarity="nhi", fusion="set_average"
    )
    k_max = len(small_store.records)
    curve = precision_curve(cases, small_store, template, k_max)
    assert [k for k, _ in curve.points] == list(range(1, k_max + 1))
    assert all(0.0 <= v <= 1.0 for _, v in curve.points)
    # k=1 point equals mean AveP at n=1
    assert curve.points[0][1] == pytest.approx(
        mean_ave_p(cases, small_store, template, 1)
    )


def test_precision_curve_k_max_validation(small_store):
    cases = _cases_from_store(small_store)
    template = QuerySpec(
        hists=np.zeros((1, small_store.bins)), similarity="nc", fusion="none"
    )
    with pytest.raises(SpecInvalidError):
        precision_curve(cases, small_store, template, 0)
    with pytest.raises(SpecInvalidError):
        precision_curve(cases, small_store, template, len(small_store.records) + 1)
    with pytest.raises(EmptyInputError):
        precision_curve([], small_store, template, 2)


def test_store_categories(small_store):
    cats = store_categories(small_store)
    assert set(cats) == {r.object_id for r in small_store.records}
    assert cats["obj00"] == "cat0"
    assert cats["obj01"] == "cat1"


# ---------------------------------------------------------------------------
# CSV


def test_csv_roundtrip(tmp_path):
    curve = PrecisionCurve(points=[(1, 1.0), (2, 0.75), (3, 1.0 / 3.0)])
    path = tmp_path / "curve.csv"
    emit_csv(curve, path)
    text = path.read_text()
    lines = text.strip().splitlines()
    assert lines[0] == "k,avep"
    assert lines[1] == "1,1.000000"
    assert lines[3] == "3,0.333333"
    back = read_csv(path)
    assert [k for k, _ in back.points] == [1, 2, 3]
    for (_, a), (_, b) in zip(back.points, curve.points):
        assert a == pytest.approx(b, abs=5e-7)


def test_csv_bad_header(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("rank,value\n1,0.5\n")
    with pytest.raises(ValueError):
        read_csv(path)
