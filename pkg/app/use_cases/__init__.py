"""Use Cases."""
