"""Numerical model maps ``x -> A(flow_1(x))`` built from invariant potentials."""
