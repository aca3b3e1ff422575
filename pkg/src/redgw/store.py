"""Persistent memoization of computed invariants.

A cache file is plain text: a one-line header carrying the format version
and the ambient dimension, then one tab-separated record per line::

    <serialized key>\t<p/q>\t<computed|fixture>

Records are kept in canonical order (sorted by serialized key), so two
stores holding the same record set serialize identically and a load/save
round trip is byte-identical.  Fixture records are authoritative: a
computed value that disagrees with a fixture is a hard error rather than
an overwrite.
"""

from __future__ import annotations

import os
import tempfile
import threading
from typing import Callable, Dict, Optional

from .keys import InvariantKey, Rat, ValidationError, rat_from_str, rat_to_str

FORMAT_VERSION = 1

ENV_CACHE_PATH = "REDGW_CACHE"

PROVENANCE_COMPUTED = "computed"
PROVENANCE_FIXTURE = "fixture"
_PROVENANCES = (PROVENANCE_COMPUTED, PROVENANCE_FIXTURE)


class StoreError(ValueError):
    """Malformed cache file or incompatible header."""


class FixtureConflictError(StoreError):
    """A computed value disagrees with a pinned fixture."""

    def __init__(self, key: InvariantKey, fixture: Rat, computed: Rat):
        self.key = key
        self.fixture = fixture
        self.computed = computed
        super().__init__(
            f"computed value {rat_to_str(computed)} conflicts with fixture "
            f"{rat_to_str(fixture)} for key [{key.serialize()}]"
        )


class CacheStore:
    """Thread-safe invariant cache with single-flight get-or-compute."""

    def __init__(self, m: Optional[int] = None):
        self.m = m
        self._records: Dict[str, tuple[Rat, str]] = {}
        self._lock = threading.Lock()
        # serialized key -> Event, present while some thread is computing it
        self._inflight: Dict[str, threading.Event] = {}

    # -- basic record access ------------------------------------------------

    def __len__(self) -> int:
        return len(self._records)

    def __contains__(self, key: InvariantKey) -> bool:
        return key.normalized().serialize() in self._records

    def get(self, key: InvariantKey) -> Optional[Rat]:
        rec = self._records.get(key.normalized().serialize())
        return rec[0] if rec is not None else None

    def provenance(self, key: InvariantKey) -> Optional[str]:
        rec = self._records.get(key.normalized().serialize())
        return rec[1] if rec is not None else None

    def put(self, key: InvariantKey, value: Rat,
            provenance: str = PROVENANCE_COMPUTED) -> None:
        if provenance not in _PROVENANCES:
            raise StoreError(f"unknown provenance {provenance!r}")
        skey = key.normalized().serialize()
        with self._lock:
            self._store_locked(key, skey, value, provenance)

    def add_fixture(self, key: InvariantKey, value: Rat) -> None:
        self.put(key, value, PROVENANCE_FIXTURE)

    def _store_locked(self, key: InvariantKey, skey: str, value: Rat,
                      provenance: str) -> None:
        existing = self._records.get(skey)
        if existing is not None:
            old_value, old_prov = existing
            if old_value != value:
                if old_prov == PROVENANCE_FIXTURE:
                    raise FixtureConflictError(key, old_value, value)
                if provenance == PROVENANCE_FIXTURE:
                    raise FixtureConflictError(key, value, old_value)
                raise StoreError(
                    f"conflicting computed values {rat_to_str(old_value)} and "
                    f"{rat_to_str(value)} for key [{skey}]"
                )
            # Fixture provenance wins; never downgrade fixture -> computed.
            if old_prov == PROVENANCE_FIXTURE:
                return
        self._records[skey] = (value, provenance)

    # -- single-flight memoization ------------------------------------------

    def get_or_compute(self, key: InvariantKey,
                       producer: Callable[[InvariantKey], Rat]) -> Rat:
        """Return the cached value, invoking ``producer`` at most once per key.

        Concurrent callers for the same key block until the single in-flight
        computation finishes.  A produced value that contradicts a fixture
        raises :class:`FixtureConflictError`.
        """
        norm = key.normalized()
        skey = norm.serialize()
        while True:
            with self._lock:
                rec = self._records.get(skey)
                if rec is not None:
                    return rec[0]
                event = self._inflight.get(skey)
                if event is None:
                    event = threading.Event()
                    self._inflight[skey] = event
                    owner = True
                else:
                    owner = False
            if not owner:
                event.wait()
                continue  # re-check the record (or recompute on failure)
            try:
                value = producer(norm)
                with self._lock:
                    self._store_locked(norm, skey, value, PROVENANCE_COMPUTED)
                return value
            finally:
                with self._lock:
                    self._inflight.pop(skey, None)
                event.set()

    def merge(self, other: "CacheStore") -> None:
        """Absorb another store's records.  Fixture records stay
        authoritative on both sides; a value disagreement raises."""
        with other._lock:
            records = dict(other._records)
        with self._lock:
            for skey, (value, provenance) in records.items():
                key = InvariantKey.deserialize(skey)
                self._store_locked(key, skey, value, provenance)

    def clear_computed(self) -> None:
        """Drop computed records, keeping fixtures."""
        with self._lock:
            self._records = {
                k: v for k, v in self._records.items()
                if v[1] == PROVENANCE_FIXTURE
            }

    # -- serialization ------------------------------------------------------

    def _header(self) -> str:
        m_txt = "*" if self.m is None else str(self.m)
        return f"# redgw cache v{FORMAT_VERSION} m={m_txt}"

    def dumps(self) -> str:
        lines = [self._header()]
        for skey in sorted(self._records):
            value, provenance = self._records[skey]
            lines.append(f"{skey}\t{rat_to_str(value)}\t{provenance}")
        return "\n".join(lines) + "\n"

    def save(self, path: str | os.PathLike) -> None:
        """Atomic save: write to a sibling temp file, then rename."""
        path = os.fspath(path)
        directory = os.path.dirname(path) or "."
        data = self.dumps()
        fd, tmp = tempfile.mkstemp(dir=directory, prefix=".redgw-cache-")
        try:
            with os.fdopen(fd, "w") as fh:
                fh.write(data)
            os.replace(tmp, path)
        except BaseException:
            try:
                os.unlink(tmp)
            except OSError:
                pass
            raise


def load(path: str | os.PathLike) -> CacheStore:
    with open(path, "r") as fh:
        return _parse(fh.read(), os.fspath(path))


def load_string(text: str) -> CacheStore:
    return _parse(text, "<string>")


def _parse(text: str, source: str) -> CacheStore:
    lines = text.splitlines()
    if not lines:
        raise StoreError(f"{source}: empty cache file (missing header)")
    header = lines[0]
    tokens = header.split()
    if (
        len(tokens) != 5
        or tokens[0] != "#"
        or tokens[1] != "redgw"
        or tokens[2] != "cache"
        or not tokens[3].startswith("v")
        or not tokens[4].startswith("m=")
    ):
        raise StoreError(f"{source}:1: unrecognized cache header {header!r}")
    try:
        version = int(tokens[3][1:])
    except ValueError as exc:
        raise StoreError(f"{source}:1: bad version in header {header!r}") from exc
    if version != FORMAT_VERSION:
        raise StoreError(
            f"{source}:1: cache format v{version} is not supported "
            f"(expected v{FORMAT_VERSION})"
        )
    m_txt = tokens[4][2:]
    m = None if m_txt == "*" else int(m_txt)
    store = CacheStore(m=m)
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        cols = line.split("\t")
        if len(cols) != 3:
            raise StoreError(
                f"{source}:{lineno}: expected 3 tab-separated columns, "
                f"got {len(cols)}"
            )
        key_txt, value_txt, provenance = cols
        if provenance not in _PROVENANCES:
            raise StoreError(
                f"{source}:{lineno}: unknown provenance {provenance!r}"
            )
        try:
            key = InvariantKey.deserialize(key_txt)
            value = rat_from_str(value_txt)
        except ValidationError as exc:
            raise StoreError(f"{source}:{lineno}: {exc}") from exc
        try:
            store.put(key, value, provenance)
        except StoreError as exc:
            raise StoreError(f"{source}:{lineno}: {exc}") from exc
    return store


def default_cache_path() -> Optional[str]:
    """Cache path from the environment, if configured."""
    path = os.environ.get(ENV_CACHE_PATH)
    return path if path else None


def fixture_store(m: Optional[int] = None) -> CacheStore:
    """Fresh store seeded with the packaged fixture records (the external
    inputs of the genus-one recursion)."""
    from importlib.resources import files

    text = files("redgw").joinpath("data/fixtures.tsv").read_text()
    st = _parse(text, "redgw/data/fixtures.tsv")
    st.m = m
    return st
