"""Heralded transfer of single-excitation entanglement from two-level systems
to free-electron sideband ladders: simulator, closed forms and sweeps."""

__version__ = "0.1.0"
