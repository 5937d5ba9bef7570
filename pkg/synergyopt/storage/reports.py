"""Report files under a run's output directory."""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import TYPE_CHECKING, Any

import structlog
from pydantic import BaseModel, ValidationError

from synergyopt.exceptions import DocumentError

if TYPE_CHECKING:
    from collections.abc import Sequence

logger = structlog.get_logger(__name__)

VALIDATION_REPORT = "validation_report.json"
FORCE_REPORT = "force_report.json"
FORCE_TRACE = "force_trace.csv"
KIN_REPORT = "kin_report.json"
KIN_TRACE = "kin_trace.csv"
COMPARISON_REPORT = "comparison_report.json"
MRM_VS_PCA = "mrm_vs_pca.csv"
DISTANCES = "distances.csv"


class ReportStore:
    """Reads and writes JSON and CSV reports inside one directory."""

    def __init__(self, base_dir: Path) -> None:
        self._base = base_dir.resolve()
        self._base.mkdir(parents=True, exist_ok=True)

    @property
    def base_dir(self) -> Path:
        return self._base

    def _safe_path(self, *parts: str) -> Path:
        """Resolve path with traversal protection."""
        path = (self._base / Path(*parts)).resolve()
        if not path.is_relative_to(self._base):
            msg = f"Path traversal detected: {'/'.join(parts)}"
            raise ValueError(msg)
        return path

    def path(self, name: str) -> Path:
        return self._safe_path(name)

    def exists(self, name: str) -> bool:
        return self._safe_path(name).is_file()

    def write_json(self, name: str, payload: BaseModel | dict[str, Any]) -> Path:
        path = self._safe_path(name)
        if isinstance(payload, BaseModel):
            text = payload.model_dump_json(indent=2)
        else:
            text = json.dumps(payload, indent=2, sort_keys=True)
        path.write_text(text + "\n", encoding="utf-8")
        logger.debug("report_saved", path=str(path), size=len(text))
        return path

    def write_csv(
        self, name: str, rows: Sequence[dict[str, Any]], fieldnames: Sequence[str]
    ) -> Path:
        path = self._safe_path(name)
        with path.open("w", newline="", encoding="utf-8") as fh:
            writer = csv.DictWriter(fh, fieldnames=list(fieldnames))
            writer.writeheader()
            writer.writerows(rows)
        logger.debug("csv_saved", path=str(path), rows=len(rows))
        return path

    def read_report[M: BaseModel](self, name: str, model: type[M]) -> M | None:
        """Parse a stored report; None when it does not exist."""
        path = self._safe_path(name)
        if not path.is_file():
            return None
        try:
            return model.model_validate_json(path.read_text(encoding="utf-8"))
        except ValidationError as e:
            msg = f"{name}: stored report does not match its schema ({e.error_count()} error(s))"
            raise DocumentError(msg) from e
