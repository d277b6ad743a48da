"""Gradient-like torus diffeomorphisms inducing A2 = [[-1,-1],[1,0]]."""

__version__ = "0.1.0"
