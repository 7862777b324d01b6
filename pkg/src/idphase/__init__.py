"""Identifiability phase transitions for lifted covariance systems.

Subpackages follow the pipeline: ``signatures`` draws random signature
matrices, ``lifting`` builds the constraint system (and its semi-random
surrogate), ``certifier`` decides the conic feasibility event by LP,
``theory`` computes the analytical boundary, ``statdim`` estimates cone
statistical dimensions by Monte Carlo, and ``experiments`` orchestrates
phase diagrams.  ``idphase.cli`` exposes all of it as subcommands.
"""

__version__ = "0.1.0"
