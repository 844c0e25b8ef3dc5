"""Partial maxima of long-memory symmetric stable processes and their Frechet limits.

Modules:

* ``randkit``: counter-based random streams and inverse-transform samplers
* ``frechet_limits``: Frechet laws, the stable tail constant, exact joint CDFs
* ``ladder_flow``: the null-recurrent ladder chain, wandering rates, ``mu_n`` sampler
* ``series_process``: series sampler for the normalised partial-maxima path
* ``limit_sampler``: exact Poisson-point samplers of the limit processes
* ``harness``: KS gates, experiment drivers and the ``maxstable-lab`` CLI
"""

from importlib import metadata as _metadata

try:
    __version__ = _metadata.version("maxstable-lab")
except _metadata.PackageNotFoundError:  # running from a source tree
    __version__ = "0.0.0"
