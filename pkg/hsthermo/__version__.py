"""Version information for hsthermo."""
__version__ = "0.1.0"
