"""Context tests."""
