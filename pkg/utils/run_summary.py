"""
Run Summary - machine-readable JSON written next to every output file

Holds final energy and momenta, drift maxima, Newton statistics, masked
sample counts and the normalized run description.
"""

import json
from pathlib import Path
from typing import Any

import numpy as np

from utils.logger import get_logger

logger = get_logger(__name__)


def summary_path(output: Path) -> Path:
    """<output>.summary.json"""
    return output.with_name(output.name + ".summary.json")


def to_jsonable(value: Any) -> Any:
    """Convert numpy scalars/arrays and non-finite floats into plain JSON values"""
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [to_jsonable(v) for v in value.tolist()]
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float) and not np.isfinite(value):
        return None
    if isinstance(value, Path):
        return str(value)
    return value


def write_summary(output: Path, summary: dict) -> Path:
    """Write the summary for an output file and return its path"""
    path = summary_path(output)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(to_jsonable(summary), f, indent=2, ensure_ascii=False)
    logger.info(f"Summary written to {path}")
    return path


def load_summary(output: Path) -> dict:
    """Read back the summary of an output file"""
    with open(summary_path(output), "r", encoding="utf-8") as f:
        return json.load(f)


def format_summary(summary: dict, indent: int = 0) -> str:
    """Plain-text rendering: one `key: value` line per leaf, nested blocks indented"""
    lines = []
    pad = "  " * indent
    for key, value in summary.items():
        if key == "config":
            continue
        if isinstance(value, dict):
            lines.append(f"{pad}{key}:")
            lines.append(format_summary(value, indent + 1))
        elif isinstance(value, float):
            lines.append(f"{pad}{key}: {value:.10g}")
        elif isinstance(value, (list, tuple, np.ndarray)):
            rendered = ", ".join(f"{v:.10g}" if isinstance(v, float) else str(v) for v in to_jsonable(value))
            lines.append(f"{pad}{key}: [{rendered}]")
        else:
            lines.append(f"{pad}{key}: {value}")
    return "\n".join(line for line in lines if line)
