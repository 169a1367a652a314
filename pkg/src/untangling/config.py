"""Tunable limits for the decision pipeline."""

from dataclasses import dataclass


@dataclass(frozen=True)
class UntangleConfig:
    """``budget`` caps weak-embedding search nodes; ``cutoff`` enables the 12g class limit."""

    budget: int = 200_000
    cutoff: bool = True

    def __post_init__(self):
        if self.budget < 0:
            raise ValueError("budget must be non-negative")
