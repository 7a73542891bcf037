"""TinyMyo inference engine."""
