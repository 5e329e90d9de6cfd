"""Shipped example problems."""
