"""Numerical toolkit for the ray transform of symmetric tensor fields.

Simulates sinograms of symmetric m-tensor fields on R^n, certifies range
membership of sinogram data through differential range conditions, evaluates
weighted Sobolev norms on line space, and reconstructs the solenoidal part
of a field from its transform.
"""

__version__ = "0.1.0"
