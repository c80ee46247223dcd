# Ring-road ACC cyberattack simulator
"""
Deterministic microscopic traffic simulator for a ring road of mixed
human-driven and ACC-equipped vehicles.

This package provides core functionality for:
- IDM car-following dynamics with per-type parameter presets
- Communication-based cyberattack injectors (DPDA, PA, FA, BA, AVA, MA)
- Phase-sliced stability metrics and risk classification
- Experiment sweeps with CSV trajectories and text reports
"""

__version__ = "0.1.0"
