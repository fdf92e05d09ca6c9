"""Tests for unitary equivalence of normal loops and paths."""
