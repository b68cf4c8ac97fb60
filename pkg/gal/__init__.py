"""Exact checks and solvers for graded anti-pre-Lie structures on the Witt and Virasoro algebras."""
