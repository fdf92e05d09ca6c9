"""Tests for the expression grammar."""
