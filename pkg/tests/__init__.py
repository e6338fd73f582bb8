"""Tests for Pachner Walk."""
