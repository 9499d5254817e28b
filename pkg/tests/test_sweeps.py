import math

import numpy as np
import pytest

from epibehave.onset import c_threshold, onset_beta_interval
from epibehave.sweeps import (SweepRow, SweepTable, final_size_sweep, log_grid, monotone_segments,
                              peak_sweep, sweep)


def test_monotone_segments():
    assert monotone_segments([1, 2, 3, 2, 1]) == (3, 3)
    assert monotone_segments([1, 2, 3]) == (3, 1)
    assert monotone_segments([3, 2, 2, 1]) == (1, 2)


def test_table_requires_increasing():
    with pytest.raises(ValueError):
        SweepTable("beta", (SweepRow(1.0), SweepRow(1.0)))


def test_sweep_rejects_bad_input(base):
    with pytest.raises(ValueError):
        sweep(base, "gamma", [0.1, 0.2])
    with pytest.raises(ValueError):
        sweep(base, "beta", [0.3, 0.4], outcomes=("nope",))
    with pytest.raises(ValueError):
        sweep(base, "beta", [0.3])


def test_beta_peak_rises_then_falls(base):
    iv = onset_beta_interval(base)
    t = peak_sweep(base, "beta", log_grid(iv.beta_lo * 1.02, iv.beta_hi * 0.98, 200))
    lead, trail = monotone_segments(t.column("i_peak"))
    assert lead > 1 and trail > 1 and lead + trail >= len(t.rows) + 1
    assert 0.2 < t.argmax_peak() < 0.4
    assert not any(r.error for r in t.rows)


def test_c_peak_increasing(base):
    t = peak_sweep(base, "c", np.linspace(c_threshold(base) * 1.05, 20, 40))
    assert np.all(np.diff(t.column("i_peak")) > 0)


def test_standard_peak_increasing_in_beta(base):
    t = peak_sweep(base.with_(eta=0.0), "beta", np.linspace(0.15, 3, 30))
    assert np.all(np.diff(t.column("i_peak")) > 0)


def test_final_size_sweep(base):
    iv = onset_beta_interval(base)
    t = final_size_sweep(base, "beta", log_grid(iv.beta_lo * 1.02, iv.beta_hi * 0.98, 60))
    s = t.column("s_inf")
    assert np.all(np.isfinite(s)) and np.all(np.diff(s) < 0)
    assert np.all(t.column("s_inf_standard") <= s)
    assert np.all(s < t.column("herd_threshold"))


def test_rows_keep_grid_order_with_workers(base):
    grid = np.linspace(0.2, 2.0, 24)
    a = sweep(base, "beta", grid, workers=1)
    b = sweep(base, "beta", grid, workers=4)
    assert np.array_equal(a.values, b.values)
    assert np.array_equal(a.column("i_peak"), b.column("i_peak"), equal_nan=True)


def test_row_failure_is_captured(base):
    t = sweep(base, "i0", [1e-4, 0.5])
    assert not t.rows[1].took_off
    assert t.rows[1].i_peak == 0.5
    assert math.isfinite(t.rows[0].i_peak)


def test_row_error_recorded(base):
    # the phase solution is undefined once the seed forces full distancing
    t = sweep(base, "i0", [1e-4, 0.9])
    assert t.rows[1].error.startswith("DomainError")
    assert t.rows[0].error == ""
