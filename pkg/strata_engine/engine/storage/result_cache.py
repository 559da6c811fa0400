"""
Result Cache for the strata engine

Stores finished JSON reports on disk, content-addressed by a digest of the
request (command, canonical partitions, guards) and the engine version.
"""

import hashlib
import json
import os
import tempfile
import threading
from pathlib import Path
from typing import Any, Callable, Dict, Optional

from ...version import __version__
from . import logger


class ResultCache:
    """
    Content-addressed cache of JSON reports.

    Entries live in ``<cache_dir>/<digest>.json``. A bumped engine version
    changes every digest, so stale entries are never read. Unreadable or
    corrupt entries are treated as misses and overwritten on the next put.

    Attributes:
        cache_dir (Path): Directory holding the entries
        enabled (bool): When False every lookup misses and nothing is written
        version (str): Engine version mixed into every key
    """

    def __init__(self, cache_dir: Path, enabled: bool = True, version: str = __version__):
        """
        Initialize the cache.

        Args:
            cache_dir (Path): Directory for cache entries (created lazily)
            enabled (bool): Disable to always recompute
            version (str): Version string mixed into every key
        """
        self.cache_dir = Path(cache_dir)
        self.enabled = enabled
        self.version = version
        self._locks: Dict[str, threading.Lock] = {}
        self._guard = threading.Lock()
        logger.debug(f"ResultCache: dir={self.cache_dir} enabled={enabled} version={version}")

    def key(self, command: str, request: Dict[str, Any]) -> str:
        """
        Digest of a canonical request descriptor.

        Args:
            command (str): CLI command name
            request (Dict[str, Any]): Canonical arguments (partitions in text form, guards)

        Returns:
            str: Hex sha256 digest
        """
        descriptor = {"command": command, "request": request, "version": self.version}
        blob = json.dumps(descriptor, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()

    def _path(self, key: str) -> Path:
        return self.cache_dir / f"{key}.json"

    def lock(self, key: str) -> threading.Lock:
        with self._guard:
            return self._locks.setdefault(key, threading.Lock())

    def cache_get(self, key: str) -> Optional[Dict[str, Any]]:
        """
        Read an entry.

        Args:
            key (str): Digest from ``key``

        Returns:
            Optional[Dict[str, Any]]: The stored report, or None on a miss
        """
        if not self.enabled:
            return None
        path = self._path(key)
        try:
            with open(path, "r", encoding="utf-8") as f:
                entry = json.load(f)
        except FileNotFoundError:
            return None
        except (OSError, ValueError) as e:
            logger.warning(f"ResultCache: unreadable entry {path.name}, recomputing: {e}")
            return None
        if not isinstance(entry, dict) or entry.get("version") != self.version or "report" not in entry:
            logger.warning(f"ResultCache: malformed entry {path.name}, recomputing")
            return None
        logger.info(f"ResultCache: hit {key[:12]}")
        return entry["report"]

    def cache_put(self, key: str, report: Dict[str, Any]) -> bool:
        """
        Write an entry atomically (temporary file, then rename).

        Args:
            key (str): Digest from ``key``
            report (Dict[str, Any]): JSON-serializable report

        Returns:
            bool: Whether the entry was written
        """
        if not self.enabled:
            return False
        tmp_name = None
        try:
            self.cache_dir.mkdir(parents=True, exist_ok=True)
            fd, tmp_name = tempfile.mkstemp(dir=self.cache_dir, suffix=".tmp")
            with os.fdopen(fd, "w", encoding="utf-8") as f:
                json.dump({"version": self.version, "report": report}, f, sort_keys=True, indent=2)
            os.replace(tmp_name, self._path(key))
        except OSError as e:
            logger.warning(f"ResultCache: could not write {key[:12]}: {e}")
            if tmp_name and os.path.exists(tmp_name):
                os.unlink(tmp_name)
            return False
        logger.debug(f"ResultCache: stored {key[:12]}")
        return True

    def get_or_compute(self, command: str, request: Dict[str, Any],
                       compute: Callable[[], Dict[str, Any]]) -> Dict[str, Any]:
        """
        Serve a cached report or compute, store and return it.

        Access to one key is serialized inside the process.

        Args:
            command (str): CLI command name
            request (Dict[str, Any]): Canonical arguments
            compute (Callable[[], Dict[str, Any]]): Produces the report on a miss

        Returns:
            Dict[str, Any]: The report
        """
        key = self.key(command, request)
        with self.lock(key):
            cached = self.cache_get(key)
            if cached is not None:
                return cached
            report = compute()
            self.cache_put(key, report)
            return report
