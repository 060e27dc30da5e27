"""2RPQ evaluation over sparse Boolean matrix algebra.

Two interchangeable backends: a succinct k2-tree representation and an
uncompressed CSR+CSC baseline.
"""

__version__ = "0.1.0"

from sparseq.k2algebra import Restriction
from sparseq.k2matrix import K2Matrix
from sparseq.csrmatrix import CsrcMatrix

__all__ = ["K2Matrix", "CsrcMatrix", "Restriction", "__version__"]
