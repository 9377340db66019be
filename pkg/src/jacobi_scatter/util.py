"""Small shared helpers: thread configuration and deterministic summation."""

from __future__ import annotations

import os

import numpy as np

from .errors import ValidationError

__all__ = ["resolve_threads", "pairwise_sum"]

THREADS_ENV_VAR = "JACOBI_SCATTER_THREADS"


def resolve_threads(requested: int | None = None) -> int:
    """Pick a worker-thread count.

    Order of precedence: the explicit `requested` value, then the
    JACOBI_SCATTER_THREADS environment variable, then 1.
    """
    if requested is not None:
        if requested < 1:
            raise ValidationError(f"thread count must be >= 1, got {requested}")
        return requested
    raw = os.environ.get(THREADS_ENV_VAR)
    if raw is None or raw.strip() == "":
        return 1
    try:
        n = int(raw)
    except ValueError:
        raise ValidationError(f"{THREADS_ENV_VAR} must be an integer, got {raw!r}")
    if n < 1:
        raise ValidationError(f"{THREADS_ENV_VAR} must be >= 1, got {n}")
    return n


def pairwise_sum(terms: np.ndarray) -> np.ndarray:
    """Sum an array of stacked terms along axis 0 by pairwise reduction.

    The reduction tree depends only on the number of terms, so results are
    bit-for-bit reproducible regardless of thread count or evaluation order
    upstream.
    """
    a = np.asarray(terms)
    n = a.shape[0]
    while n > 1:
        half = n // 2
        head = a[: 2 * half : 2] + a[1 : 2 * half : 2]
        if n % 2:
            a = np.concatenate([head, a[2 * half : n]], axis=0)
        else:
            a = head
        n = a.shape[0]
    return a[0]
