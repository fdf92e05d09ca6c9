"""Tests for operator paths and their sources."""
