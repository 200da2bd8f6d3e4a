"""Semi-supervised multi-view clustering of texture views extracted from
grayscale images."""
from ._backend import ACTIVE as KERNEL_BACKEND

__version__ = "0.1.0"
