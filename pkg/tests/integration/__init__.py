"""
Integration tests for hsthermo
"""
