"""Bundled model files shipped with the package."""
