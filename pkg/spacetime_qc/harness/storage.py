"""Result and sample-log persistence on the local filesystem."""

import json
from abc import ABC, abstractmethod
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Union

from ..analysis.shadow import ShadowDataset
from ..utils.logger import get_logger
from .schemas import ResultRecord

logger = get_logger(__name__)


class StorageBackend(ABC):
    """Abstract base class for storage backends."""

    @abstractmethod
    def save(self, key: str, data: Union[bytes, str, Dict[str, Any]]) -> str:
        """Write (replace) an object."""
        pass

    @abstractmethod
    def append_lines(self, key: str, lines: Iterable[str]) -> str:
        """Append newline-terminated lines to an object."""
        pass

    @abstractmethod
    def load(self, key: str) -> Optional[bytes]:
        pass


class LocalStorage(StorageBackend):
    """Local filesystem storage backend."""

    def __init__(self, base_path: str = "./results"):
        """
        Initialize local storage.

        Args:
            base_path: Base directory for storage
        """
        self.base_path = Path(base_path)
        self.base_path.mkdir(parents=True, exist_ok=True)

    def _path(self, key: str) -> Path:
        path = self.base_path / key
        path.parent.mkdir(parents=True, exist_ok=True)
        return path

    def save(self, key: str, data: Union[bytes, str, Dict[str, Any]]) -> str:
        if isinstance(data, dict):
            content = json.dumps(data, indent=2, sort_keys=True).encode()
        elif isinstance(data, str):
            content = data.encode()
        else:
            content = data
        path = self._path(key)
        path.write_bytes(content)
        return str(path)

    def append_lines(self, key: str, lines: Iterable[str]) -> str:
        path = self._path(key)
        with path.open("a", encoding="utf-8") as handle:
            for line in lines:
                handle.write(line.rstrip("\n") + "\n")
        return str(path)

    def load(self, key: str) -> Optional[bytes]:
        path = self.base_path / key
        if path.exists():
            return path.read_bytes()
        return None


def _split(path: Union[str, Path]) -> tuple:
    path = Path(path)
    return LocalStorage(str(path.parent) if str(path.parent) else "."), path.name


def append_record(path: Union[str, Path], record: ResultRecord) -> str:
    """Append one result record to an NDJSON file."""
    storage, key = _split(path)
    written = storage.append_lines(key, [record.to_json_line()])
    logger.info("result appended", path=written, kind=record.kind.value, passed=record.passed)
    return written


def load_records(path: Union[str, Path]) -> List[ResultRecord]:
    """Read every record of an NDJSON result file."""
    storage, key = _split(path)
    content = storage.load(key)
    if content is None:
        raise FileNotFoundError(f"No result file at {path}")
    return [ResultRecord.from_json_line(line) for line in content.decode().splitlines() if line.strip()]


def write_sample_log(path: Union[str, Path], dataset: ShadowDataset) -> str:
    """Write shadow samples as NDJSON, one sample per line (replaces the file)."""
    storage, key = _split(path)
    lines = [json.dumps(r, sort_keys=True) for r in dataset.to_records()]
    written = storage.save(key, "".join(line + "\n" for line in lines))
    logger.info("sample log written", path=written, samples=len(dataset))
    return written


def read_sample_log(path: Union[str, Path]) -> ShadowDataset:
    storage, key = _split(path)
    content = storage.load(key)
    if content is None:
        raise FileNotFoundError(f"No sample log at {path}")
    records = [json.loads(line) for line in content.decode().splitlines() if line.strip()]
    return ShadowDataset.from_records(records)
