import logging
from dataclasses import asdict
from pathlib import Path
from typing import List, Optional

import pandas as pd

from apps.worker.simulation.spectral_sim import SimResult
from apps.worker.stability_config import STABILITY_CONFIG
from apps.worker.tasks.run_sweep import SweepRow, count_disagreements

logger = logging.getLogger(__name__)

FLOAT_FORMAT = STABILITY_CONFIG["cli"]["float_format"]

SWEEP_COLUMNS = [
    "index",
    "parameter",
    "value",
    "status",
    "theorem",
    "stable",
    "marginal",
    "threshold",
    "margin",
    "oracle_min",
    "oracle_verdict",
    "agreement",
    "sim_rate",
    "error",
]

SIMULATION_COLUMNS = ["t", "seeded_mode_abs", "l2_deviation"]


def _write(df: pd.DataFrame, path: Optional[str], footer: Optional[str] = None) -> str:
    """Render with round-trip floats and '\\n' line endings; optionally write to path"""
    text = df.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    if footer:
        text += f"# {footer}\n"
    if path:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(text, encoding="utf-8")
        logger.info(f"Exported {len(df)} rows to {path}")
    return text


def sweep_frame(rows: List[SweepRow]) -> pd.DataFrame:
    return pd.DataFrame([asdict(r) for r in rows], columns=SWEEP_COLUMNS)


def export_sweep_csv(rows: List[SweepRow], path: Optional[str] = None) -> str:
    """Sweep rows in sweep order, followed by a '# disagreements=N' summary line"""
    if not rows:
        logger.warning("No sweep rows to export")
    return _write(sweep_frame(rows), path, footer=f"disagreements={count_disagreements(rows)}")


def simulation_frame(result: SimResult) -> pd.DataFrame:
    return pd.DataFrame(
        {
            "t": result.times,
            "seeded_mode_abs": result.mode_amplitudes,
            "l2_deviation": result.field_l2_deviation,
        },
        columns=SIMULATION_COLUMNS,
    )


def export_simulation_csv(result: SimResult, path: Optional[str] = None) -> str:
    return _write(simulation_frame(result), path)
