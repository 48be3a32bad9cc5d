"""Command-line interface, config files and result serialization."""
