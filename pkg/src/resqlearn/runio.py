"""Result-file plumbing: CSV writing, checksums, and run manifests.

All floats are written with ``repr``, the shortest decimal string that
round-trips to the same double, so reruns diff byte-for-byte and other
implementations can parse files without precision loss.
"""

from __future__ import annotations

import csv
import hashlib
import json
from pathlib import Path

from .errors import InputError


def fmt_value(value) -> str:
    if isinstance(value, bool):
        return str(value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(path, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt_value(v) for v in row])


def read_csv(path, expected_header: list[str] | None = None) -> list[list[str]]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if expected_header is not None and header != expected_header:
            raise InputError(f"unexpected header {header} in {path}, wanted {expected_header}")
        return [row for row in reader]


def sha256_of(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 16), b""):
            digest.update(block)
    return digest.hexdigest()


def write_manifest(
    path,
    run_id: str,
    tool_version: str,
    config_snapshot: dict,
    files: list[Path],
    started: str,
    finished: str,
) -> None:
    """Written last: every referenced file must already exist."""
    entries = []
    for f in files:
        f = Path(f)
        if not f.exists():
            raise InputError(f"manifest references missing file {f}")
        entries.append({"name": f.name, "sha256": sha256_of(f), "bytes": f.stat().st_size})
    doc = {
        "run_id": run_id,
        "tool_version": tool_version,
        "seed": config_snapshot.get("seed"),
        "started": started,
        "finished": finished,
        "config": config_snapshot,
        "files": entries,
    }
    Path(path).write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def read_manifest(path) -> dict:
    return json.loads(Path(path).read_text())


def verify_manifest(path) -> None:
    """Raises if any referenced file is missing or fails its checksum."""
    doc = read_manifest(path)
    base = Path(path).parent
    for entry in doc["files"]:
        target = base / entry["name"]
        if not target.exists():
            raise InputError(f"manifest file missing: {target}")
        if sha256_of(target) != entry["sha256"]:
            raise InputError(f"checksum mismatch for {target}")
