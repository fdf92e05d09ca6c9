"""Tests for the finite-rank approximation."""
