"""Losses tests."""
