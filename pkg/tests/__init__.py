"""Tests for loop-squeezer."""
