"""Small shared helpers: logging setup, progress bars, thread fan-out, timestamp formatting."""
