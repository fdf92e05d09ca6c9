"""Test suite for spectralloop."""
