"""Prompt-propagation 3D tumor segmentation harness.

Segments a 3D scan from a single-slice prompt by propagating slice-wise
predictions along configurable orderings, scores the result volumetrically,
and exposes the workflow through a CLI and an HTTP service.
"""

__version__ = "0.1.0"
