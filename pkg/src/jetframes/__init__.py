"""Exact symbolic verifier for tangent frames on vertical jet spaces of
universal hypersurfaces in an affine chart."""

__version__ = "0.1.0"
