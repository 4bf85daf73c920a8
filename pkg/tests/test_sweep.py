import io

import pandas as pd
import pytest

from apps.errors import ArgumentError
from apps.worker.export.csv_export import (
    SIMULATION_COLUMNS,
    SWEEP_COLUMNS,
    export_simulation_csv,
    export_sweep_csv,
)
from apps.worker.simulation.spectral_sim import make_sim_config, simulate_linear
from apps.worker.spectral.kernels import KernelFamily, KernelSpec
from apps.worker.spectral.linearization import ModelP2, build_symbol
from apps.worker.tasks import run_sweep as run_sweep_module
from apps.worker.tasks.run_sweep import (
    SweepOutput,
    SweepParameter,
    SweepRow,
    SweepSpec,
    count_disagreements,
    run_sweep,
    verdict_flips,
)

EXP1D = KernelSpec(KernelFamily.EXP_1D)


def _d_sweep(**overrides):
    options = dict(
        problem="p2",
        kernel=EXP1D,
        parameter=SweepParameter.D,
        lo=0.05,
        hi=0.10,
        steps=11,
        fixed={"a": 2.5, "b": 1.0},
    )
    options.update(overrides)
    return SweepSpec(**options)


def test_d_sweep_flips_once_at_threshold():
    """Verdict changes exactly once, between the rows bracketing d₂ ≈ 0.0718"""
    rows = run_sweep(_d_sweep())
    assert [r.index for r in rows] == list(range(11))
    flips = verdict_flips(rows)
    assert len(flips) == 1
    i = flips[0]
    assert rows[i].value < 0.0718 < rows[i + 1].value
    assert not rows[i].stable and rows[i + 1].stable


def test_d_sweep_agrees_with_oracle():
    """Every row's analytic verdict matches the oracle sign"""
    rows = run_sweep(_d_sweep(), threads=2)
    assert all(r.status == "ok" for r in rows)
    assert all(r.agreement for r in rows)
    assert count_disagreements(rows) == 0


def test_alpha_sweep_threshold_scaling():
    """Exp1D thresholds scale like 1/α²"""
    spec = SweepSpec(
        problem="p2",
        kernel=EXP1D,
        parameter=SweepParameter.ALPHA,
        lo=0.5,
        hi=2.0,
        steps=3,
        log=True,
        fixed={"d": 0.1, "a": 2.5, "b": 1.0},
        outputs=(SweepOutput.THRESHOLD,),
    )
    rows = run_sweep(spec)
    for row in rows:
        assert row.threshold * row.value ** 2 == pytest.approx(rows[0].threshold * rows[0].value ** 2, rel=1e-12)


def test_sweep_rows_with_domain_errors():
    """Rows outside the domain are flagged and the sweep continues"""
    spec = _d_sweep(parameter=SweepParameter.B, lo=1.0, hi=2.0, steps=5, fixed={"a": 2.5, "d": 0.1})
    rows = run_sweep(spec)
    statuses = [r.status for r in rows]
    assert statuses == ["ok", "ok", "ok", "error", "error"]
    assert "a²/4" in rows[-1].error


def test_oracle_skipped_when_not_requested(mocker):
    """Verdict-only sweeps never call the oracle"""
    spy = mocker.spy(run_sweep_module, "grid_min_symbol")
    rows = run_sweep(_d_sweep(outputs=(SweepOutput.VERDICT,), steps=4))
    assert spy.call_count == 0
    assert all(r.oracle_min is None and r.agreement is None for r in rows)


def test_sweep_spec_validation():
    """Empty ranges and mismatched parameters raise ArgumentError"""
    with pytest.raises(ArgumentError):
        _d_sweep(lo=0.1, hi=0.1)
    with pytest.raises(ArgumentError):
        _d_sweep(steps=1)
    with pytest.raises(ArgumentError):
        _d_sweep(lo=-1.0, log=True)
    with pytest.raises(ArgumentError):
        _d_sweep(parameter=SweepParameter.K)
    with pytest.raises(ArgumentError):
        _d_sweep(parameter=SweepParameter.N)


def test_k2_sweep_problem1_window():
    """Problem 1 window sweep over k₂ with a = 0 flips at 1/threshold"""
    spec = SweepSpec(
        problem="p1",
        kernel=KernelSpec(KernelFamily.WINDOW_1D, window_half_width=1.0),
        parameter=SweepParameter.K2,
        lo=70.0,
        hi=100.0,
        steps=7,
        fixed={"a": 0.0, "b": 1.0},
    )
    rows = run_sweep(spec)
    assert rows[0].stable and not rows[-1].stable
    assert all(r.theorem == "T1" for r in rows)
    assert count_disagreements(rows) == 0


def test_export_sweep_csv_footer():
    """CSV has the fixed columns and a disagreement footer"""
    rows = run_sweep(_d_sweep(steps=5))
    text = export_sweep_csv(rows)
    lines = text.splitlines()
    assert lines[0] == ",".join(SWEEP_COLUMNS)
    assert lines[-1] == "# disagreements=0"
    df = pd.read_csv(io.StringIO(text), comment="#")
    assert len(df) == 5
    assert df["value"].tolist() == [r.value for r in rows]


def test_export_sweep_counts_disagreements(tmp_path):
    """Footer counts rows whose agreement is False"""
    rows = [
        SweepRow(index=0, parameter="d", value=0.1, stable=True, agreement=True),
        SweepRow(index=1, parameter="d", value=0.2, stable=True, agreement=False),
    ]
    path = tmp_path / "out" / "sweep.csv"
    text = export_sweep_csv(rows, str(path))
    assert path.read_text(encoding="utf-8") == text
    assert text.endswith("# disagreements=1\n")


def test_export_simulation_csv():
    """Simulation time series as t, seeded mode, l2 deviation"""
    symbol = build_symbol(ModelP2(d=0.2, a=2.5, b=1.0), EXP1D, 1)
    result = simulate_linear(make_sim_config(symbol))
    text = export_simulation_csv(result)
    df = pd.read_csv(io.StringIO(text))
    assert list(df.columns) == SIMULATION_COLUMNS
    assert len(df) == len(result.times)
    assert df["t"].iloc[0] == 0.0


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
