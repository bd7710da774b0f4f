"""This package contains test for the application."""
