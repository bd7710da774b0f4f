"""App."""
