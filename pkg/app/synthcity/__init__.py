"""Synthetic city."""
