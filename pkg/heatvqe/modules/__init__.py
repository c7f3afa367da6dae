"""Numerical core for HeatVQE: simulator, heat operators, ansatzes and solvers."""
