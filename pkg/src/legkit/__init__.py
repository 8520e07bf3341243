"""legkit: exact checks for Legendrian varieties in projective symplectic space."""

__version__ = "0.1.0"
