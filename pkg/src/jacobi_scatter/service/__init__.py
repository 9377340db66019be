"""HTTP service wrapping the scattering package."""

from .app import create_app

__all__ = ["create_app"]
