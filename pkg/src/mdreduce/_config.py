from __future__ import annotations

import os

DEFAULT_ENUM_CAP = 16
DEFAULT_MDMDP_CAP = 10
ENV_VAR = "MDD_ENUM_CAP"


def enum_cap(cap: int | None = None, default: int = DEFAULT_ENUM_CAP) -> int:
    """Resolve an enumeration cap: explicit argument, then MDD_ENUM_CAP, then default."""
    if cap is not None:
        return int(cap)
    env = os.environ.get(ENV_VAR)
    if env:
        return int(env)
    return default


def check_cap(size: int, cap: int | None = None, default: int = DEFAULT_ENUM_CAP, what: str = "enumeration") -> None:
    from .errors import EnumerationCapExceeded

    limit = enum_cap(cap, default)
    if size > limit:
        raise EnumerationCapExceeded(size, limit, what)
