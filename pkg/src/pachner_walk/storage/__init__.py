"""Output files of simulation runs."""

from pachner_walk.storage.writers import RunWriter

__all__ = ["RunWriter"]
