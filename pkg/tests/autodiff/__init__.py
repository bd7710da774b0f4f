"""Autodiff tests."""
