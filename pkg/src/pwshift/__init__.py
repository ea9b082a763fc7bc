"""Second-order unitary perturbation theory for partial-wave phase shifts."""

__version__ = "0.1.0"
