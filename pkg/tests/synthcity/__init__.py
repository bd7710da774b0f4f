"""Synthcity tests."""
