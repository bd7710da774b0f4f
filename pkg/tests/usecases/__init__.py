"""Usecases tests."""
