"""CSV/JSON writers and the run manifest."""

from __future__ import annotations

import csv
import hashlib
import json
import math
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Iterable, Sequence

import numpy as np


def fmt(value: Any) -> str:
    """Render one CSV cell; floats get 17 significant digits."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".17g")
    if isinstance(value, np.integer):
        return str(int(value))
    return str(getattr(value, "value", value))


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    path = Path(path)
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) for v in row])
    return path


def read_csv(path: Path) -> list[dict[str, str]]:
    with Path(path).open(encoding="utf-8", newline="") as fh:
        return list(csv.DictReader(fh))


def _jsonable(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(getattr(k, "value", k)): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.generic):
        return _jsonable(obj.item())
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if hasattr(obj, "value") and not isinstance(obj, (int, float, str, bool)):
        return obj.value
    return obj


def write_json(path: Path, payload: Any) -> Path:
    path = Path(path)
    text = json.dumps(_jsonable(payload), indent=2, sort_keys=True, ensure_ascii=False)
    path.write_text(text + "\n", encoding="utf-8", newline="\n")
    return path


def sha256(path: Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def write_manifest(out_dir: Path, files: Sequence[Path], info: dict[str, Any]) -> Path:
    """Record digests of every data file; the manifest itself is not digested."""
    from .. import __version__
    from .._kernels import BACKEND

    out_dir = Path(out_dir)
    manifest = {
        "tool": "primecurves",
        "version": __version__,
        "backend": BACKEND,
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        **info,
        "files": [
            {"path": Path(f).name, "sha256": sha256(f), "bytes": Path(f).stat().st_size}
            for f in sorted(files, key=lambda p: Path(p).name)
        ],
    }
    return write_json(out_dir / "manifest.json", manifest)
