"""Tests for loop-squeezer commands."""
