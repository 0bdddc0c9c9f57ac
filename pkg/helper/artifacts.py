"""
Artifact headers and writers for reproducible outputs
"""
import csv
import hashlib
import json
import os
from typing import Any, Dict, Iterable, List, Optional, Sequence

from settings import settings


def config_hash(config: Dict[str, Any]) -> str:
    """SHA-256 of the canonical JSON form of a resolved config"""
    canonical = json.dumps(config, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def make_header(config: Optional[Dict[str, Any]] = None, seeds: Optional[Sequence[int]] = None,
                **extra: Any) -> Dict[str, Any]:
    """
    Build the header embedded at the top of every output file

    Args:
        config: Resolved experiment configuration (JSON-able)
        seeds: Seeds used by the run
        extra: Additional header fields

    Returns:
        Header dictionary
    """
    header: Dict[str, Any] = {
        "tool": settings.APP_NAME,
        "version": settings.VERSION,
        "config_hash": config_hash(config) if config is not None else None,
        "seeds": list(seeds) if seeds else [],
    }
    header.update(extra)
    return header


def _ensure_parent(path: str) -> None:
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)


def write_json(path: str, payload: Dict[str, Any], header: Dict[str, Any]) -> str:
    _ensure_parent(path)
    document = {"header": header}
    document.update(payload)
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(document, handle, indent=2, sort_keys=False)
        handle.write("\n")
    return path


def read_json(path: str) -> Dict[str, Any]:
    with open(path, "r", encoding="utf-8") as handle:
        return json.load(handle)


def write_jsonl(path: str, lines: Iterable[str], header: Dict[str, Any]) -> str:
    """Write pre-serialized JSON lines after a header line"""
    _ensure_parent(path)
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(json.dumps({"header": header}, sort_keys=True) + "\n")
        for line in lines:
            handle.write(line + "\n")
    return path


def read_jsonl(path: str) -> tuple:
    """Return (header, body lines)"""
    header: Dict[str, Any] = {}
    body: List[str] = []
    with open(path, "r", encoding="utf-8") as handle:
        for raw in handle:
            raw = raw.strip()
            if not raw:
                continue
            if not body and not header and raw.startswith('{"header"'):
                header = json.loads(raw)["header"]
                continue
            body.append(raw)
    return header, body


def write_csv(path: str, columns: Sequence[str], rows: Iterable[Sequence[Any]],
              header: Dict[str, Any]) -> str:
    _ensure_parent(path)
    with open(path, "w", encoding="utf-8", newline="") as handle:
        for key, value in header.items():
            handle.write(f"# {key}={json.dumps(value, sort_keys=True)}\n")
        writer = csv.writer(handle)
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_csv_cell(v) for v in row])
    return path


def read_csv(path: str) -> tuple:
    """Return (header, columns, rows) with header values JSON-decoded"""
    header: Dict[str, Any] = {}
    with open(path, "r", encoding="utf-8", newline="") as handle:
        lines = handle.read().splitlines()
    body = []
    for line in lines:
        if line.startswith("# ") and "=" in line and not body:
            key, value = line[2:].split("=", 1)
            header[key] = json.loads(value)
        else:
            body.append(line)
    reader = csv.reader(body)
    rows = list(reader)
    return header, rows[0], rows[1:]


def _csv_cell(value: Any) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)
