"""Console presentation for hsthermo results."""
