"""Computation layer: colorings, polytope estimates, the state sum, convergence and fitting."""
