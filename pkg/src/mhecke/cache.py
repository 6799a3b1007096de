"""On-disk cache of Gamma0(N)-class lists keyed by (d, N, beta).

Entries are plain ClassList JSON.  Anything unreadable is treated as a miss
and rewritten, so a damaged cache never changes results.
"""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path

from .quadforms import ClassList, betas, class_representatives

__all__ = ["ClassCache", "default_cache_dir"]


def default_cache_dir() -> Path:
    base = os.environ.get("XDG_CACHE_HOME") or os.path.join(os.path.expanduser("~"), ".cache")
    return Path(base) / "mhecke"


class ClassCache:
    """``directory=None`` disables the disk layer (memory only)."""

    def __init__(self, directory=None):
        self.directory = Path(directory) if directory is not None else None
        self._mem = {}
        self.hits = 0
        self.misses = 0

    def _path(self, d, N, beta):
        return self.directory / f"classes-d{d}-N{N}-b{beta}.json"

    def _load(self, d, N, beta):
        try:
            obj = json.loads(self._path(d, N, beta).read_text())
            cl = ClassList.from_json(obj["classes"])
            if obj.get("schema") != "1" or (cl.d, cl.N, cl.beta) != (d, N, beta):
                return None
            return cl
        except (OSError, ValueError, KeyError, TypeError):
            return None

    def _store(self, cl: ClassList):
        try:
            self.directory.mkdir(parents=True, exist_ok=True)
            payload = json.dumps({"schema": "1", "classes": cl.to_json()}, sort_keys=True)
            fd, tmp = tempfile.mkstemp(dir=self.directory, suffix=".tmp")
            with os.fdopen(fd, "w") as fh:
                fh.write(payload)
            os.replace(tmp, self._path(cl.d, cl.N, cl.beta))
        except OSError:
            pass  # caching is best effort

    def get(self, d: int, N: int, beta: int) -> ClassList:
        beta %= 2 * N
        key = (d, N, beta)
        if key in self._mem:
            self.hits += 1
            return self._mem[key]
        cl = self._load(d, N, beta) if self.directory is not None else None
        if cl is None:
            self.misses += 1
            cl = class_representatives(d, N, beta)
            if self.directory is not None:
                self._store(cl)
        else:
            self.hits += 1
        self._mem[key] = cl
        return cl

    def all_classes(self, d: int, N: int, D=None) -> list[ClassList]:
        out = [self.get(d, N, b) for b in betas(d, N)]
        return [cl.with_character(D) for cl in out] if D is not None else out
