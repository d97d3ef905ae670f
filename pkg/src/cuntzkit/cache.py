"""Content-addressed persistence for exact operator blocks.

A block is keyed by (operator name, alphabet size, grade); the key plus a
schema version is hashed into the file name, so bumping the version strands
every stale entry without any migration step.  Entries are stored as decimal
numerator/denominator strings and read back bit-exactly.  Writes go through
a temporary file and an atomic rename, which makes concurrent insert-or-read
of the same immutable block safe.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import tempfile
import time
import warnings
from fractions import Fraction
from pathlib import Path
from typing import NamedTuple, Optional

from .operators import BlockOperator, GradeIndex, build_block

SCHEMA_VERSION = 1

log = logging.getLogger("cuntzkit.cache")


class CacheEvent(NamedTuple):
    """Timing record for one block request; source is 'hit' or 'build'."""

    operator: str
    alphabet: int
    grade: GradeIndex
    source: str
    seconds: float


def _digest(name: str, alphabet: int, grade: GradeIndex) -> str:
    key = f"{SCHEMA_VERSION}:{name}:{alphabet}:{grade.n}:{grade.k}"
    return hashlib.sha256(key.encode("ascii")).hexdigest()


def _fraction_field(text: str) -> Fraction:
    value = Fraction(text)
    if str(value) != text:
        raise ValueError(f"non-canonical rational {text!r}")
    return value


class BlockCache:
    """Directory of persisted exact blocks with build-on-miss semantics."""

    def __init__(self, root) -> None:
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self.last_event: Optional[CacheEvent] = None

    def path_for(self, name: str, alphabet: int, grade: GradeIndex) -> Path:
        return self.root / f"{_digest(name, alphabet, GradeIndex(*grade))}.json"

    def load(self, name: str, alphabet: int, grade: GradeIndex) -> Optional[BlockOperator]:
        """The stored block, or None on a miss; corrupt files count as misses."""
        grade = GradeIndex(*grade)
        path = self.path_for(name, alphabet, grade)
        if not path.exists():
            return None
        try:
            payload = json.loads(path.read_text())
            if payload["schema"] != SCHEMA_VERSION:
                raise ValueError(f"schema {payload['schema']}")
            key = (payload["operator"], payload["N"], payload["n"], payload["k"])
            if key != (name, alphabet, grade.n, grade.k):
                raise ValueError("key fields do not match the file address")
            entries = tuple(
                tuple(_fraction_field(cell) for cell in row)
                for row in payload["entries"]
            )
            norms = tuple(_fraction_field(cell) for cell in payload["norm_sq_diag"])
            dim = payload["dim"]
            if len(entries) != dim or any(len(row) != dim for row in entries):
                raise ValueError("entry shape does not match dim")
            if len(norms) != dim:
                raise ValueError("norm_sq_diag shape does not match dim")
        except (KeyError, TypeError, ValueError, ZeroDivisionError,
                json.JSONDecodeError) as err:
            warnings.warn(f"discarding corrupt cache file {path.name}: {err}")
            return None
        return BlockOperator(name, alphabet, grade, entries, norms)

    def store(self, block: BlockOperator, build_seconds: float) -> Path:
        path = self.path_for(block.name, block.alphabet, block.grade)
        payload = {
            "schema": SCHEMA_VERSION,
            "operator": block.name,
            "N": block.alphabet,
            "n": block.grade.n,
            "k": block.grade.k,
            "dim": block.dim,
            "build_seconds": build_seconds,
            "entries": [[str(cell) for cell in row] for row in block.entries],
            "norm_sq_diag": [str(cell) for cell in block.norm_sq_diag],
        }
        fd, tmp = tempfile.mkstemp(dir=self.root, suffix=".tmp")
        try:
            with os.fdopen(fd, "w") as handle:
                json.dump(payload, handle)
            os.replace(tmp, path)
        except BaseException:
            os.unlink(tmp)
            raise
        return path

    def get(self, name: str, alphabet: int, grade: GradeIndex,
            exact_cap: int = 729, builder=build_block) -> BlockOperator:
        """Load the block, or build and persist it on a miss.

        builder must produce a block whose name field equals the key name;
        assembled operator variants pass their own constructor here.
        """
        grade = GradeIndex(*grade)
        start = time.perf_counter()
        block = self.load(name, alphabet, grade)
        source = "hit"
        if block is None:
            source = "build"
            block = builder(name, alphabet, grade, exact_cap)
            if block.name != name:
                raise ValueError(f"builder produced {block.name!r} for key {name!r}")
            self.store(block, time.perf_counter() - start)
        seconds = time.perf_counter() - start
        self.last_event = CacheEvent(name, alphabet, grade, source, seconds)
        log.info("block %s N=%d grade=(%d,%d): %s in %.6fs",
                 name, alphabet, grade.n, grade.k, source, seconds)
        return block
