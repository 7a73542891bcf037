"""Command-line surface: argument parsing, DI wiring, subcommands."""
