"""Exact temporo-spatial averages on shifts and the circle."""
