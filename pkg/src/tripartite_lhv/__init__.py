"""Three-qubit states with a local hidden variable model, and checks of their properties."""

__version__ = "0.1.0"
