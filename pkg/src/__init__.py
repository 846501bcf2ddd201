"""Stokes FEM - конечноэлементные схемы для полустационарной системы Стокса сжимаемого газа."""
from .main import StokesApp, cli, main

__all__ = ["StokesApp", "cli", "main"]
__version__ = "1.0.0"
