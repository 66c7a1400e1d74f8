"""Min-unextendible entanglement and super two-extendibility of bipartite states.

The package is organised bottom up:

* :mod:`unext.linalg` - tensor layouts, partial traces, support projectors
* :mod:`unext.states` - density operators and the state families used here
* :mod:`unext.channels` - Kraus channels, including a one-way LOCC catalogue
* :mod:`unext.entropy` - von Neumann entropy, min-relative entropy, coherent information
* :mod:`unext.sdp` - a dense primal-dual interior-point SDP solver
* :mod:`unext.unextendible` - the min-unextendible entanglement and related witnesses
* :mod:`unext.verify` - numerical verification suites
* :mod:`unext.cli` - the ``unext`` command
"""

from .linalg import Part, SystemDims
from .states import DensityOperator
from .unextendible import EminReport, emin, is_super_two_extendible

__all__ = ["Part", "SystemDims", "DensityOperator", "EminReport", "emin", "is_super_two_extendible"]
__version__ = "0.1.0"
