"""Exception types shared across the package."""

from __future__ import annotations


class ValidationError(ValueError):
    """Invalid input data or a violated operation precondition."""


class ScenarioError(ValidationError):
    """Scenario file fault, tagged with the JSON path of the offending field."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


class GridBudgetError(RuntimeError):
    """Requested grid evaluation exceeds the configured cell budget."""
