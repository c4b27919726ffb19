"""
Кэш результатов узлов с адресацией по содержимому.

Ключ - SHA-256 канонического JSON (тип узла, параметры, ключи входов).
Артефакты узла лежат в <root>/<key[:2]>/<key>/, метаданные - в meta.json.
"""

import hashlib
import json
import logging
import shutil
import tempfile
import threading
from dataclasses import asdict, dataclass
from datetime import datetime
from pathlib import Path
from typing import Any, Callable, Dict, Mapping, Optional, Sequence, Union

from ..constants import Formats


logger = logging.getLogger(__name__)


def canonical_json(value: Any) -> str:
    """Детерминированная сериализация: ключи по порядку, без пробелов."""
    return json.dumps(value, sort_keys=True, separators=(",", ":"), ensure_ascii=False, allow_nan=False)


def cache_key(
    kind: str,
    params: Mapping[str, Any],
    input_keys: Sequence[str] = (),
    fingerprint: Optional[Mapping[str, Any]] = None,
) -> str:
    """
    Ключ кэша узла.

    Args:
        kind: Тип узла
        params: Параметры узла
        input_keys: Ключи входных узлов в порядке входов
        fingerprint: Отпечаток внешних данных (например, хэш входного файла)

    Returns:
        str: Hex-дайджест SHA-256
    """
    material = {
        "schema": Formats.GRAPH_SCHEMA_VERSION,
        "kind": kind,
        "params": dict(params),
        "inputs": list(input_keys),
    }
    if fingerprint:
        material["fingerprint"] = dict(fingerprint)
    return hashlib.sha256(canonical_json(material).encode("utf-8")).hexdigest()


def file_digest(path: Union[str, Path]) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


@dataclass(frozen=True)
class CacheEntry:
    """Запись кэша: ключ, директория артефактов и метаданные создания."""
    key: str
    path: Path
    kind: str
    created_at: str
    params: Dict[str, Any]


class CacheStore:
    """
    Директория кэша.

    Публикация атомарна (переименование временной директории); при гонке
    побеждает первый записавший, содержимое одинаково по построению.
    """

    def __init__(self, root: Union[str, Path]):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self._locks: Dict[str, threading.Lock] = {}
        self._guard = threading.Lock()

    def entry_dir(self, key: str) -> Path:
        return self.root / key[:2] / key

    def _lock(self, key: str) -> threading.Lock:
        with self._guard:
            return self._locks.setdefault(key, threading.Lock())

    def lookup(self, key: str) -> Optional[CacheEntry]:
        meta_path = self.entry_dir(key) / Formats.CACHE_META
        if not meta_path.is_file():
            return None
        with open(meta_path, "r", encoding="utf-8") as f:
            meta = json.load(f)
        return CacheEntry(
            key=key,
            path=self.entry_dir(key),
            kind=meta.get("kind", ""),
            created_at=meta.get("created_at", ""),
            params=meta.get("params", {}),
        )

    def publish(
        self,
        key: str,
        kind: str,
        params: Mapping[str, Any],
        build: Callable[[Path], None],
    ) -> CacheEntry:
        """
        Строит артефакты во временной директории и публикует их под ключом.

        Args:
            build: Функция, заполняющая переданную директорию

        Returns:
            CacheEntry: Опубликованная (или уже существующая) запись
        """
        with self._lock(key):
            existing = self.lookup(key)
            if existing is not None:
                return existing

            staging = Path(tempfile.mkdtemp(prefix=".staging-", dir=self.root))
            try:
                artifacts = staging / "artifacts"
                artifacts.mkdir()
                build(artifacts)
                entry = CacheEntry(
                    key=key,
                    path=self.entry_dir(key),
                    kind=kind,
                    created_at=datetime.now().isoformat(),
                    params=dict(params),
                )
                meta = {k: v for k, v in asdict(entry).items() if k != "path"}
                with open(artifacts / Formats.CACHE_META, "w", encoding="utf-8") as f:
                    json.dump(meta, f, indent=2, ensure_ascii=False)

                target = self.entry_dir(key)
                target.parent.mkdir(parents=True, exist_ok=True)
                try:
                    artifacts.rename(target)
                except OSError:
                    # Другой процесс успел опубликовать тот же ключ
                    published = self.lookup(key)
                    if published is None:
                        raise
                    logger.debug(f"Ключ {key[:12]} уже опубликован")
                    return published
                return entry
            finally:
                shutil.rmtree(staging, ignore_errors=True)

    def artifact_files(self, key: str) -> Dict[str, bytes]:
        """Содержимое артефактов записи (без meta.json) по относительному пути."""
        root = self.entry_dir(key)
        return {
            path.relative_to(root).as_posix(): path.read_bytes()
            for path in sorted(root.rglob("*"))
            if path.is_file() and path.name != Formats.CACHE_META
        }
