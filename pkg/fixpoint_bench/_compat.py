"""Backports of standard library features for older interpreters."""

from __future__ import annotations

try:
    from enum import StrEnum  # noqa: F401
except ImportError:  # Python < 3.11
    from enum import Enum

    class StrEnum(str, Enum):
        """Enum whose members are also strings (stdlib 3.11 semantics)."""

        __str__ = str.__str__
        __format__ = str.__format__

        @staticmethod
        def _generate_next_value_(name, start, count, last_values):
            return name.lower()
