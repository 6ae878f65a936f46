"""Symmetry-reduced extendibility SDPs for k-block-positivity."""
