import threading
from contextlib import contextmanager
from typing import Dict, Hashable, Iterator, List, Optional


class ReadWriteLock:
    """
    Many readers or one writer. A writer that is waiting holds back new
    readers, so a bundle swap is not starved by steady classify traffic.
    `generation` counts completed writes.
    """

    def __init__(self) -> None:
        self._mutex = threading.Lock()
        self._no_readers = threading.Condition(self._mutex)
        self._no_writer = threading.Condition(self._mutex)
        self._active_readers = 0
        self._pending_writers = 0
        self._writer: Optional[int] = None
        self.generation = 0

    @contextmanager
    def read_lock(self) -> Iterator[None]:
        with self._mutex:
            if self._writer == threading.get_ident():
                raise RuntimeError("read_lock requested by the thread holding write_lock")
            self._no_writer.wait_for(lambda: self._writer is None and self._pending_writers == 0)
            self._active_readers += 1
        try:
            yield
        finally:
            with self._mutex:
                self._active_readers -= 1
                if self._active_readers == 0:
                    self._no_readers.notify_all()

    @contextmanager
    def write_lock(self) -> Iterator[None]:
        me = threading.get_ident()
        with self._mutex:
            if self._writer == me:
                raise RuntimeError("write_lock is not reentrant")
            self._pending_writers += 1
            try:
                self._no_readers.wait_for(lambda: self._writer is None and self._active_readers == 0)
            finally:
                self._pending_writers -= 1
            self._writer = me
        try:
            yield
        finally:
            with self._mutex:
                self._writer = None
                self.generation += 1
                # the next writer waits on no_readers, blocked readers on no_writer
                self._no_readers.notify_all()
                self._no_writer.notify_all()


class KeyedLock:
    """
    One mutex per key while someone holds or waits for it. Entries are
    dropped once the last holder leaves, so the table stays as small as
    the number of keys in flight.
    """

    def __init__(self) -> None:
        self._guard = threading.Lock()
        self._entries: Dict[Hashable, List] = {}  # key -> [lock, users]

    @contextmanager
    def hold(self, key: Hashable) -> Iterator[None]:
        with self._guard:
            entry = self._entries.get(key)
            if entry is None:
                entry = self._entries[key] = [threading.Lock(), 0]
            entry[1] += 1
        try:
            with entry[0]:
                yield
        finally:
            with self._guard:
                entry[1] -= 1
                if entry[1] == 0:
                    del self._entries[key]

    def __len__(self) -> int:
        with self._guard:
            return len(self._entries)
