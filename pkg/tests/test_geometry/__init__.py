"""Tests for projection-triple geometry."""
