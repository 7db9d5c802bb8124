import numpy as np
import pytest

from crashlens.errors import UsageError
from crashlens.marketdata import compute_log_returns, dump_wide_csv, load_price_table
from crashlens.synthetic import synthetic_crash_prices


def mean_offdiag_corr(block):
    c = np.corrcoef(block, rowvar=False)
    m = c.shape[0]
    return (c.sum() - m) / (m * (m - 1))


def test_shape_and_invariants():
    p = synthetic_crash_prices()
    assert p.prices.shape == (2001, 42)
    assert len(p.symbols) == 42
    assert np.all(p.prices > 0)
    assert list(p.dates) == sorted(p.dates)


def test_deterministic_for_fixed_seed():
    a = synthetic_crash_prices(seed=7)
    b = synthetic_crash_prices(seed=7)
    assert np.array_equal(a.prices, b.prices)
    assert not np.array_equal(a.prices, synthetic_crash_prices(seed=8).prices)


def test_crash_regime_is_correlated_and_negative():
    p = synthetic_crash_prices()
    r = compute_log_returns(p).returns
    crash = r[272:287]
    quiet = r[100:250]
    assert mean_offdiag_corr(crash) > 5 * mean_offdiag_corr(quiet)
    assert crash.mean() < 0
    # common-factor noise dominates the standard error of the block mean
    assert quiet.mean() == pytest.approx(0.0002, abs=1.5e-3)


def test_csv_round_trip():
    p = synthetic_crash_prices(n_symbols=5, n_days=30, crash_start=5, crash_len=8)
    text = dump_wide_csv(p)
    back = load_price_table(text.splitlines())
    assert back.symbols == p.symbols
    assert back.dates == p.dates
    assert np.array_equal(back.prices, p.prices)


def test_parameter_validation():
    with pytest.raises(UsageError):
        synthetic_crash_prices(n_symbols=1)
    with pytest.raises(UsageError):
        synthetic_crash_prices(n_days=100, crash_start=95)
