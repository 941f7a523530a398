"""Integration tests (acceptance-scale experiment runs)."""
