"""Persistent JSON-lines store for Q-functions.

Layout of a cache directory::

    index.json        {key: sha256 of the stored line}
    qmac-wNN.jsonl    one polynomial per line, grouped by weight NN

A line whose hash disagrees with the index is treated as missing, so the
caller recomputes and rewrites it.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
from pathlib import Path

import orjson
from filelock import FileLock

from gmpy2 import mpq

from .polyring import OddPolynomial

__all__ = ["CacheStore", "default_cache_dir", "CACHE_ENV"]

CACHE_ENV = "QTAU_CACHE_DIR"


def default_cache_dir() -> Path | None:
    value = os.environ.get(CACHE_ENV)
    return Path(value) if value else None


def _digest(line: str) -> str:
    return hashlib.sha256(line.encode()).hexdigest()


def encode_line(key: str, poly: OddPolynomial) -> str:
    """Compact line: packed monomial ints, and the coefficients as one
    space-separated string of "p/q" (decodes faster than a JSON list)."""
    items = poly.sorted_terms()
    obj = {
        "key": key,
        "weight_cap": poly.cap,
        "monomials": [m for m, _ in items],
        "coeffs": " ".join(str(c) for _, c in items),
    }
    return json.dumps(obj, separators=(",", ":"))


def decode_line(obj: dict, memo: dict | None = None) -> OddPolynomial:
    """Inverse of :func:`encode_line`.

    ``memo`` maps coefficient strings to parsed values; Q-functions share
    most of their coefficients, and mpq values are immutable.
    """
    # the line hash was already checked, so skip the validating constructor
    cap = obj["weight_cap"]
    coeffs = obj["coeffs"].split()
    if not isinstance(cap, int) or len(obj["monomials"]) != len(coeffs):
        raise ValueError("malformed cache line")
    if memo is None:
        values = map(mpq, coeffs)
    else:
        fresh = set(coeffs).difference(memo)
        memo.update(zip(fresh, map(mpq, fresh)))
        values = map(memo.__getitem__, coeffs)
    return OddPolynomial._raw(dict(zip(obj["monomials"], values)), cap)


class CacheStore:
    def __init__(self, directory):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()
        self._file_lock = FileLock(str(self.directory / ".lock"))
        self._index: dict[str, str] = {}
        self._lines: dict[str, str] = {}
        self._parsed: dict[str, dict] = {}
        self._coeff_memo: dict[str, mpq] = {}
        self._loaded_files: set[str] = set()
        self._pending: dict[str, tuple[str, str]] = {}
        self.hits = 0
        self.misses = 0
        self.corrupt = 0
        self._read_index()

    @property
    def index_path(self) -> Path:
        return self.directory / "index.json"

    def _read_index(self):
        if self.index_path.exists():
            try:
                self._index = json.loads(self.index_path.read_text())
            except json.JSONDecodeError:
                self._index = {}

    def _file_for(self, weight: int) -> str:
        return f"qmac-w{weight:02d}.jsonl"

    def _load_file(self, name: str):
        if name in self._loaded_files:
            return
        self._loaded_files.add(name)
        path = self.directory / name
        if not path.exists():
            return
        with path.open() as fh:
            for line in fh:
                line = line.rstrip("\n")
                if not line:
                    continue
                try:
                    obj = orjson.loads(line)
                    key = obj["key"]
                except (json.JSONDecodeError, KeyError, TypeError):
                    self.corrupt += 1
                    continue
                self._lines[key] = line
                self._parsed[key] = obj

    @staticmethod
    def key(partition, cap: int) -> str:
        return f"qmac:{partition}:{cap}"

    def get(self, partition, cap: int) -> OddPolynomial | None:
        key = self.key(partition, cap)
        with self._lock:
            self._load_file(self._file_for(cap))
            line = self._lines.get(key)
            if line is None or key not in self._index:
                self.misses += 1
                return None
            if _digest(line) != self._index[key]:
                self.corrupt += 1
                self.misses += 1
                return None
            obj = self._parsed.get(key)
        try:
            poly = decode_line(obj if obj is not None else orjson.loads(line), self._coeff_memo)
        except (KeyError, TypeError, ValueError):
            with self._lock:
                self.corrupt += 1
                self.misses += 1
            return None
        with self._lock:
            self.hits += 1
        return poly

    def put(self, partition, cap: int, poly: OddPolynomial) -> None:
        key = self.key(partition, cap)
        line = encode_line(key, poly)
        with self._lock:
            if self._index.get(key) == _digest(line) and self._lines.get(key) == line:
                return
            self._pending[key] = (self._file_for(cap), line)

    def flush(self) -> None:
        """Write pending entries; one writer at a time across processes."""
        with self._lock:
            if not self._pending:
                return
            with self._file_lock:
                self._read_index()
                by_file: dict[str, list[tuple[str, str]]] = {}
                for key, (name, line) in sorted(self._pending.items()):
                    by_file.setdefault(name, []).append((key, line))
                for name, entries in by_file.items():
                    with (self.directory / name).open("a") as fh:
                        for key, line in entries:
                            fh.write(line + "\n")
                            self._index[key] = _digest(line)
                            self._lines[key] = line
                            self._parsed.pop(key, None)
                tmp = self.index_path.with_suffix(".tmp")
                tmp.write_text(json.dumps(self._index, sort_keys=True))
                tmp.replace(self.index_path)
            self._pending.clear()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.flush()

    def __len__(self):
        return len(self._index)
