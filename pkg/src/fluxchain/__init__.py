"""fluxchain: circuit-QED toolkit for a fluxonium coupled to a microwave
photonic-crystal chain."""

__version__ = "0.1.0"
