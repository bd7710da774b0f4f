"""Fixed semantic and geometry encoders."""
