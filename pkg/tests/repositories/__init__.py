"""This package contains test repositories for the application."""
