"""Exact cohomology of |1|-graded parabolic models and numeric conformal tractor calculus."""

__version__ = "0.1.0"
