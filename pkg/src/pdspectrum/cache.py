"""On-disk cache of level tables, keyed by lambda text, precision and format version."""

from __future__ import annotations

import json
import logging
import os
import tempfile
from pathlib import Path
from typing import Optional, Union

from .bands import FORMAT_VERSION, LevelTable
from .traces import ModelParams

ENV_VAR = "PDSPECTRUM_CACHE"
log = logging.getLogger(__name__)


def default_cache_dir() -> Path:
    env = os.environ.get(ENV_VAR)
    if env:
        return Path(env)
    return Path(os.environ.get("XDG_CACHE_HOME", Path.home() / ".cache")) / "pdspectrum"


def cache_key(params: ModelParams) -> dict:
    return {
        "format": FORMAT_VERSION,
        "lambda": params.lam_text,
        "precision": params.precision_bits if params.precision_bits is not None else "auto",
    }


class LevelCache:
    """One JSON file per level under ``root/v<format>/lam-<lambda>/bits-<precision>/``.

    Enclosures go through hexadecimal float strings, so a load returns the
    stored values bit for bit.  A file that fails to parse or carries a
    different key is ignored with a warning and the level is recomputed.
    """

    def __init__(self, root: Union[str, Path, None] = None):
        self.root = Path(root) if root is not None else default_cache_dir()
        self.hits = 0
        self.misses = 0

    def path(self, params: ModelParams, level: int) -> Path:
        key = cache_key(params)
        return (self.root / f"v{key['format']}" / f"lam-{key['lambda']}"
                / f"bits-{key['precision']}" / f"level-{level:02d}.json")

    def load(self, params: ModelParams, level: int) -> Optional[LevelTable]:
        p = self.path(params, level)
        if not p.exists():
            self.misses += 1
            return None
        try:
            doc = json.loads(p.read_text())
            if doc.get("key") != cache_key(params):
                raise ValueError("key mismatch")
            table = LevelTable.from_json(doc["table"])
            if table.level != level or table.lam != params.lam:
                raise ValueError("content does not match its key")
        except Exception as exc:  # anything unreadable is recomputed
            log.warning("ignoring corrupt cache file %s: %s", p, exc)
            self.misses += 1
            return None
        self.hits += 1
        return table

    def store(self, params: ModelParams, table: LevelTable) -> Path:
        p = self.path(params, table.level)
        p.parent.mkdir(parents=True, exist_ok=True)
        doc = {"key": cache_key(params), "table": table.to_json()}
        text = json.dumps(doc, sort_keys=True, separators=(",", ":"))
        fd, tmp = tempfile.mkstemp(dir=p.parent, prefix=".tmp-")
        try:
            with os.fdopen(fd, "w") as fh:
                fh.write(text)
            os.replace(tmp, p)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
        return p
