"""Size bounds for the enumerating operations.

Each bound has a default; setting ``LYNPERM_MAX_SIZE`` in the environment
replaces all of them with one value.
"""
import os

DEFAULTS = {
    "permutations": 8,
    "lyndon": 7,
    "flag": 8,
    "density": 6,
    "reduction": 5,
}


class BoundExceeded(ValueError):
    """An argument is larger than the configured size bound."""


def bound(name):
    override = os.environ.get("LYNPERM_MAX_SIZE")
    if override:
        return int(override)
    return DEFAULTS[name]


def check(name, value, what="size"):
    limit = bound(name)
    if value > limit:
        raise BoundExceeded(
            f"{what} {value} exceeds the {name} bound {limit} (set LYNPERM_MAX_SIZE to raise it)"
        )
