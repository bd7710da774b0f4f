"""Encoders tests."""
