"""
Unit tests for hsthermo core
"""
