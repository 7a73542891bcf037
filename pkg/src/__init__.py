"""Package root for the ``tinymyo`` command."""
