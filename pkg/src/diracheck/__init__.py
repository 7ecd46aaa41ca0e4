"""diracheck: symbolic verification engine for Dirac geometry on polynomial patches."""

__version__ = "0.1.0"
