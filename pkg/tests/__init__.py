"""Test suite for spacetime_qc."""
