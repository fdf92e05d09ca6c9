"""Tests for the spectral kernels."""
