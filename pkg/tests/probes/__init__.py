"""Probes tests."""
