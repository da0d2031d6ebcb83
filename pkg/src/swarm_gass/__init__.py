"""Derivative-free training of swarm combat policies.

Subpackages: :mod:`.search` (ES, GASS and CEM updates), :mod:`.policy`
(network, observations, safety, PID), :mod:`.sim` (the world) plus
:mod:`.scenarios`, :mod:`.harness` and the ``swarm-gass`` command line.
"""

__version__ = "0.1.0"
