import io
import math

import numpy as np
import pytest

from crashlens.errors import DataError, UsageError
from crashlens.marketdata import (
    PriceTable,
    ReturnTable,
    TableSchema,
    compute_log_returns,
    load_price_table,
    window_slices,
)


def wide(text: str) -> io.StringIO:
    return io.StringIO(text.strip() + "\n")


def test_load_minimal_wide():
    table = load_price_table(wide("date,AA,BB\n2020-01-01,1,4\n2020-01-02,2,5\n2020-01-03,3,6"))
    assert table.shape == (3, 2)
    assert table.symbols == ("AA", "BB")
    assert table.dates[0] == "2020-01-01"
    assert table.prices[2, 1] == 6.0


def test_load_long_format():
    rows = ["date,symbol,close"]
    for d in ("d1", "d2", "d3"):
        for s in ("X", "Y"):
            rows.append(f"{d},{s},{1.5}")
    table = load_price_table(wide("\n".join(rows)), TableSchema(layout="long"))
    assert table.shape == (3, 2)
    assert table.symbols == ("X", "Y")


def test_low_coverage_symbol_dropped_and_reported():
    # BB present on 6 of 10 dates -> coverage 0.6 < 0.8 -> dropped.
    rows = ["date,AA,BB"]
    for t in range(10):
        bb = "" if t % 3 == 0 else "2.0"
        rows.append(f"d{t},1.0,{bb}")
    report: list[dict] = []
    table = load_price_table(
        wide("\n".join(rows)), coverage_threshold=0.8, exclusions=report
    )
    assert table.symbols == ("AA",)
    assert report == [{"symbol": "BB", "coverage": 0.6}]


def test_inner_join_on_dates():
    text = "date,AA,BB\nd1,1.0,\nd2,2.0,4.0\nd3,3.0,5.0"
    table = load_price_table(wide(text), coverage_threshold=0.5)
    # d1 lacks BB, so it is dropped by the inner join.
    assert table.dates == ("d2", "d3")


def test_malformed_row_reports_line_number():
    with pytest.raises(DataError, match="line 3"):
        load_price_table(wide("date,AA\nd1,1.0\nd2,1.0,9.9"))
    with pytest.raises(DataError, match="line 2"):
        load_price_table(wide("date,AA\nd1,abc"))


def test_non_positive_price_names_symbol_and_date():
    with pytest.raises(DataError, match=r"BB.*d2"):
        load_price_table(wide("date,AA,BB\nd1,1,1\nd2,1,-3\nd3,1,1"))


def test_duplicate_date_rejected():
    with pytest.raises(DataError, match="duplicate"):
        load_price_table(wide("date,AA\nd1,1.0\nd1,2.0"))


def test_empty_alignment_is_an_error():
    # Both symbols fully covered never happens on a common date.
    text = "date,symbol,close\nd1,A,1.0\nd2,B,1.0"
    with pytest.raises(DataError):
        load_price_table(wide(text), TableSchema(layout="long"), coverage_threshold=0.4)


def test_schema_rejects_unknown_layout():
    with pytest.raises(UsageError):
        TableSchema(layout="tall")


def test_log_returns_exact_values():
    e = math.e
    table = PriceTable(("A",), ("d1", "d2", "d3"), np.array([[1.0], [e], [e * e]]))
    ret = compute_log_returns(table)
    assert np.allclose(ret.returns[:, 0], [1.0, 1.0], atol=1e-15)
    assert ret.dates == ("d2", "d3")


def test_log_returns_constant_and_single_step():
    const = PriceTable(("A",), ("d1", "d2", "d3"), np.full((3, 1), 5.0))
    assert np.all(compute_log_returns(const).returns == 0.0)
    pair = PriceTable(("A",), ("d1", "d2"), np.array([[100.0], [110.0]]))
    # ln(1.1) by hand: 0.09531017980432486
    assert abs(compute_log_returns(pair).returns[0, 0] - 0.0953101798) < 1e-9
    with pytest.raises(DataError):
        compute_log_returns(PriceTable(("A",), ("d1",), np.array([[1.0]])))


def test_price_round_trip():
    rng = np.random.default_rng(5)
    prices = np.exp(rng.standard_normal((300, 4)).cumsum(axis=0) * 0.02) * 50
    table = PriceTable(
        tuple(f"S{i}" for i in range(4)),
        tuple(f"d{t:04d}" for t in range(300)),
        prices,
    )
    ret = compute_log_returns(table)
    rebuilt = np.exp(np.cumsum(ret.returns, axis=0)) * prices[0]
    assert np.max(np.abs(rebuilt - prices[1:]) / prices[1:]) <= 1e-12


def test_window_counts():
    def table_with(n_returns):
        prices = np.full((n_returns + 1, 2), 3.0)
        return ReturnTable(("A", "B"), tuple(f"d{t}" for t in range(n_returns)),
                           np.zeros((n_returns, 2)))

    assert len(window_slices(table_with(2000), 20, 1)) == 1981
    assert len(window_slices(table_with(20), 20, 1)) == 1
    assert len(window_slices(table_with(2000), 20, 20)) == 100


def test_window_views_are_ordered_and_valid():
    rng = np.random.default_rng(9)
    ret = ReturnTable(
        ("A", "B", "C"),
        tuple(f"d{t}" for t in range(50)),
        rng.standard_normal((50, 3)),
    )
    views = window_slices(ret, 7, 3)
    starts = [v.start for v in views]
    assert starts == sorted(set(starts))
    for v in views:
        assert v.length == 7
        assert v.start + v.length <= 50
        assert np.array_equal(v.returns, ret.returns[v.start : v.start + 7])


def test_window_argument_validation():
    ret = ReturnTable(("A",), ("d0", "d1", "d2"), np.zeros((3, 1)))
    with pytest.raises(DataError):
        window_slices(ret, 4, 1)
    with pytest.raises(UsageError):
        window_slices(ret, 1, 1)
    with pytest.raises(UsageError):
        window_slices(ret, 2, 0)


def test_tables_are_immutable():
    table = PriceTable(("A",), ("d1", "d2"), np.array([[1.0], [2.0]]))
    with pytest.raises(ValueError):
        table.prices[0, 0] = 9.0
