"""Unit tests for Pachner Walk."""
