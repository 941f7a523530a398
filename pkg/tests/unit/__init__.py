"""Unit tests (small sizes, fixed seeds)."""
