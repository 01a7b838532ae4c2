"""Shared helpers: errors, logging setup, series files."""
