"""Identification codes over quantum channels.

Library layout:

* ``linalg``    dense operator core (tensor products, partial traces,
                entropies, spectral utilities)
* ``sampling``  seeded Haar unitaries, isometries, random channels/states
* ``channels``  channel representations and transforms, output-entropy
                maximisation, the reduction-balancing step
* ``idcodes``   identification code constructions and exact evaluation
* ``feedback``  feedback strategy simulation, typical sets, capacities
* ``verify``    Monte Carlo checks of the concentration bounds
* ``cli``       the ``qidc`` batch runner
"""

from . import channels, feedback, idcodes, linalg, sampling, serialize, verify  # noqa: F401
from ._accel import backend_name  # noqa: F401

__all__ = [
    "channels",
    "feedback",
    "idcodes",
    "linalg",
    "sampling",
    "serialize",
    "verify",
    "backend_name",
]
