"""Numerical and exact tools for the minimal disk area and displacement
energy of explicit Lagrangian tori in C^n and CP^n."""

from .curves import Circle, Keyhole, make_keyhole
from .tori import Brendel, ChekanovCn, ChekanovCPn, Product

__all__ = ["Brendel", "ChekanovCPn", "ChekanovCn", "Circle", "Keyhole", "Product", "make_keyhole"]
__version__ = "0.1.0"
