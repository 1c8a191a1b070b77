"""One-time challenge store with TTL and capacity eviction.

In-memory by design: CAPTCHA state is ephemeral at these scales and a
restart simply invalidates outstanding challenges. All mutation happens
under one re-entrant lock; `transaction()` lets the service run its
check-classify-consume sequence atomically against concurrent verifies.
"""

from __future__ import annotations

import threading
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Callable, Iterator

from .challenge import Challenge, now_ms


class StoreFullError(RuntimeError):
    """Capacity still exceeded after evicting expired challenges."""


@dataclass
class StoredChallenge:
    challenge: Challenge
    attempts: int = field(default=0)


class ChallengeStore:
    def __init__(
        self,
        capacity: int = 10_000,
        clock: Callable[[], float] = now_ms,
    ):
        self.capacity = capacity
        self.clock = clock
        self._entries: dict[str, StoredChallenge] = {}
        self._lock = threading.RLock()

    @contextmanager
    def transaction(self) -> Iterator[None]:
        """Hold the store lock across a multi-step sequence."""
        with self._lock:
            yield

    def put(self, challenge: Challenge) -> None:
        """Insert a fresh challenge, evicting expired ones if at capacity."""
        with self._lock:
            if len(self._entries) >= self.capacity:
                self.purge_expired()
            if len(self._entries) >= self.capacity:
                raise StoreFullError(f"store at capacity {self.capacity}")
            if challenge.id in self._entries:
                raise ValueError(f"duplicate challenge id {challenge.id}")
            self._entries[challenge.id] = StoredChallenge(challenge)

    def get(self, challenge_id: str) -> StoredChallenge | None:
        """Look up a live entry; expired entries are dropped on access."""
        with self._lock:
            entry = self._entries.get(challenge_id)
            if entry is None:
                return None
            if entry.challenge.is_expired(self.clock()):
                del self._entries[challenge_id]
                return None
            return entry

    def purge_expired(self, now: float | None = None) -> int:
        """Drop every challenge past its TTL; returns how many went."""
        with self._lock:
            if now is None:
                now = self.clock()
            stale = [
                cid
                for cid, entry in self._entries.items()
                if entry.challenge.is_expired(now)
            ]
            for cid in stale:
                del self._entries[cid]
            return len(stale)

    def __len__(self) -> int:
        with self._lock:
            return len(self._entries)


class StoreSweeper:
    """Background thread that purges expired challenges periodically."""

    def __init__(self, store: ChallengeStore, interval_s: float = 30.0):
        self._store = store
        self._interval_s = interval_s
        self._stop = threading.Event()
        self._thread: threading.Thread | None = None

    def start(self) -> None:
        if self._thread is not None:
            return
        self._stop.clear()
        self._thread = threading.Thread(
            target=self._run, name="keycap-store-sweeper", daemon=True
        )
        self._thread.start()

    def _run(self) -> None:
        while not self._stop.wait(self._interval_s):
            self._store.purge_expired()

    def stop(self) -> None:
        if self._thread is None:
            return
        self._stop.set()
        self._thread.join(timeout=5.0)
        self._thread = None
