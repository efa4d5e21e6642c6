"""cookbench: a workbench for zero-shot coordination in a two-player cooking gridworld."""

__version__ = "0.1.0"
