"""Errors raised while reading scenario files"""
from typing import Optional


class ScenarioError(ValueError):
    """Invalid or missing scenario setting, located by key and line number"""

    def __init__(self, message: str, key: Optional[str] = None, lineno: Optional[int] = None,
                 path: Optional[str] = None):
        self.reason = message
        self.key = key
        self.lineno = lineno
        self.path = path
        location = path or "<scenario>"
        if lineno is not None:
            location = f"{location}:{lineno}"
        label = f"{key}: " if key else ""
        super().__init__(f"{location}: {label}{message}")
