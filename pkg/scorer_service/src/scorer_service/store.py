"""Versioned model storage: one directory per model name, one vNNNN
subdirectory per fine-tuned version. The latest version serves; model names
without any version serve the untrained zero head."""
from __future__ import annotations

import re
import threading
from pathlib import Path

from .model import PairwiseHead

MODEL_NAMES = ("vbd", "cp", "pp", "np", "rp")
SHARED_NAME = "shared"
_VERSION_RE = re.compile(r"^v(\d{4})$")


class UnknownModelError(KeyError):
    pass


class ModelStore:
    def __init__(self, root: str | Path, shared_weights: bool = False):
        self.root = Path(root)
        self.shared_weights = shared_weights
        self._cache: dict[tuple[str, int], PairwiseHead] = {}
        self._lock = threading.Lock()

    def _resolve(self, name: str) -> str:
        if name not in MODEL_NAMES:
            raise UnknownModelError(name)
        return SHARED_NAME if self.shared_weights else name

    def latest_version(self, name: str) -> int:
        directory = self.root / self._resolve(name)
        if not directory.is_dir():
            return 0
        versions = [int(m.group(1)) for p in directory.iterdir()
                    if (m := _VERSION_RE.match(p.name))]
        return max(versions, default=0)

    def head(self, name: str) -> PairwiseHead:
        resolved = self._resolve(name)
        version = self.latest_version(name)
        key = (resolved, version)
        with self._lock:
            if key not in self._cache:
                if version == 0:
                    self._cache[key] = PairwiseHead()
                else:
                    self._cache[key] = PairwiseHead.load(
                        self.root / resolved / f"v{version:04d}")
            return self._cache[key]

    def save_version(self, name: str, head: PairwiseHead) -> int:
        resolved = self._resolve(name)
        version = self.latest_version(name) + 1
        head.save(self.root / resolved / f"v{version:04d}")
        return version

    def inventory(self) -> dict:
        out = {}
        for name in MODEL_NAMES:
            version = self.latest_version(name)
            head = self.head(name) if version else None
            out[name] = {
                "version": version,
                "trained_pairs": head.meta.get("trained_pairs", 0) if head else 0,
            }
        return out
