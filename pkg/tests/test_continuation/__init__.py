"""Tests for eigenvalue continuation."""
