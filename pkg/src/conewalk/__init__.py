"""Exact computations for random walks confined to cones."""
