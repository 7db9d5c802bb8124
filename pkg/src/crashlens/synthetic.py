"""Synthetic market generator: correlated geometric random walks with an
injected crash regime.

Returns follow a one-factor model r_it = mu + beta_t f_t + eps_it.  During
the crash the factor loading jumps and the factor mean turns negative, so
every symbol takes common downward shocks and cross-correlations spike; the
surrounding days stay weakly coupled.
"""

from __future__ import annotations

import datetime

import numpy as np

from .errors import UsageError
from .marketdata import PriceTable

__all__ = ["synthetic_crash_prices"]


def synthetic_crash_prices(
    n_symbols: int = 42,
    n_days: int = 2001,
    seed: int = 7,
    *,
    base_loading: float = 0.3,
    crash_loading: float = 0.9,
    crash_start: int = 272,
    crash_len: int = 15,
    factor_vol: float = 0.01,
    idio_vol: float = 0.01,
    drift: float = 0.0002,
    crash_shock: float = -0.04,
    start_price: float = 100.0,
) -> PriceTable:
    """Build a price table with a crash over return indices
    [crash_start, crash_start + crash_len).

    crash_shock shifts the factor mean during the regime; it should be
    negative to model common sell-offs.
    """
    if n_symbols < 2 or n_days < 3:
        raise UsageError("need at least 2 symbols and 3 days")
    n_returns = n_days - 1
    if not 0 <= crash_start <= n_returns - crash_len:
        raise UsageError(
            f"crash [{crash_start}, {crash_start + crash_len}) outside "
            f"the {n_returns} available returns"
        )

    rng = np.random.default_rng(seed)
    factor = factor_vol * rng.standard_normal(n_returns)
    idio = idio_vol * rng.standard_normal((n_returns, n_symbols))

    loading = np.full(n_returns, base_loading)
    regime = slice(crash_start, crash_start + crash_len)
    loading[regime] = crash_loading
    factor[regime] += crash_shock

    returns = drift + loading[:, None] * factor[:, None] + idio
    prices = start_price * np.exp(np.vstack([np.zeros(n_symbols), np.cumsum(returns, axis=0)]))

    day0 = datetime.date(2000, 1, 3)
    dates = tuple(
        (day0 + datetime.timedelta(days=i)).isoformat() for i in range(n_days)
    )
    symbols = tuple(f"S{i + 1:02d}" for i in range(n_symbols))
    return PriceTable(symbols=symbols, dates=dates, prices=prices)
