"""
Error hierarchy for the CPCG toolkit.

Negative outcomes that are part of normal operation (an invalid embedding,
an embedder running out of room, an undetected structure) are returned as
values. Exceptions are reserved for bad input and strict decoding.
"""

from typing import Iterable, List, Optional


class CpcgError(Exception):
    """Base class for all toolkit errors"""


class InputError(CpcgError, ValueError):
    """Argument or data outside the accepted domain"""


class FormatError(InputError):
    """Malformed input file"""

    def __init__(self, message: str, path: Optional[str] = None, line: Optional[int] = None):
        self.path = path
        self.line = line
        location = ""
        if path is not None:
            location = f"{path}:"
        if line is not None:
            location = f"{location}{line}:"
        super().__init__(f"{location} {message}".strip() if location else message)


class UnsupportedSizeError(InputError):
    """Clique size outside what a construction supports"""


class DecodeError(CpcgError, ValueError):
    """Strict decoding met one or more broken chains"""

    def __init__(self, broken: Iterable[str]):
        self.broken: List[str] = sorted(str(b) for b in broken)
        super().__init__(f"broken chains: {', '.join(self.broken)}")
