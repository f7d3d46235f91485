"""Cooperative cancellation shared by the counters."""

from __future__ import annotations

import threading
import time

from .errors import Cancelled, Timeout


class CancelToken:
    """Stop signal polled by long-running counts.

    ``check()`` raises :class:`Timeout` once the optional monotonic deadline
    has passed and :class:`Cancelled` once :meth:`cancel` was called.
    """

    def __init__(self, timeout: float | None = None, event: threading.Event | None = None):
        self.event = event if event is not None else threading.Event()
        self.deadline = None if timeout is None else time.monotonic() + timeout

    def cancel(self) -> None:
        self.event.set()

    @property
    def cancelled(self) -> bool:
        return self.event.is_set()

    def check(self) -> None:
        if self.event.is_set():
            raise Cancelled("count cancelled")
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise Timeout("wallclock budget exceeded")


def check(token: CancelToken | None) -> None:
    if token is not None:
        token.check()
