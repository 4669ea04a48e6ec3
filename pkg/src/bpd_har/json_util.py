"""Stable hashing and line-delimited JSON helpers."""

import hashlib
import json
import logging
from pathlib import Path
from typing import Any

from pydantic import BaseModel

logger = logging.getLogger(__name__)


def stable_dumps(payload: Any) -> str:
    return json.dumps(payload, sort_keys=True)


def hash_payload(payload: dict[str, Any]) -> str:
    """sha256 of the sorted-key JSON dump."""
    return hashlib.sha256(stable_dumps(payload).encode()).hexdigest()


def hash_config(model: BaseModel) -> str:
    return hash_payload(model.model_dump(mode="json"))


def write_json(path: Path | str, model: BaseModel | dict[str, Any]) -> Path:
    """Indented sorted-key JSON; identical inputs give identical bytes."""
    payload = model.model_dump(mode="json") if isinstance(model, BaseModel) else model
    target = Path(path)
    target.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8")
    return target


def append_jsonl(path: Path | str, record: BaseModel) -> None:
    with Path(path).open("a", encoding="utf-8") as handle:
        handle.write(stable_dumps(record.model_dump(mode="json")) + "\n")


def read_jsonl(path: Path | str) -> list[dict[str, Any]]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    return [json.loads(line) for line in lines if line.strip()]
