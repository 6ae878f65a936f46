"""Exception types and the dense-construction resource cap."""

import os

DEFAULT_DENSE_CAP = 20_000


class DomainError(ValueError):
    """An argument lies outside the domain of an operation."""


class ResourceError(RuntimeError):
    """A dense construction would exceed the configured dimension cap."""


def dense_cap() -> int:
    """Largest Hilbert-space dimension allowed for explicit dense objects.

    Overridden by the ``BLOCKPOS_CAP`` environment variable.
    """
    raw = os.environ.get("BLOCKPOS_CAP")
    if raw is None:
        return DEFAULT_DENSE_CAP
    try:
        cap = int(raw)
    except ValueError as exc:
        raise DomainError(f"BLOCKPOS_CAP must be an integer, got {raw!r}") from exc
    if cap <= 0:
        raise DomainError("BLOCKPOS_CAP must be positive")
    return cap


def check_cap(dim: int, what: str = "space") -> None:
    cap = dense_cap()
    if dim > cap:
        raise ResourceError(f"{what} has dimension {dim}, above the dense cap {cap}")
