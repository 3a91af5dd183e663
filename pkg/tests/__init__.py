"""Test suite of the uvarov package."""
