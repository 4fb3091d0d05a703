"""hsthermo test package."""
