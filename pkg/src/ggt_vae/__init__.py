"""Graph transformer variational autoencoder for link prediction."""

__version__ = "0.1.0"
