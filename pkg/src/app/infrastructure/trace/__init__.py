from .chrome import to_chrome_trace, write_chrome_trace

__all__ = ["to_chrome_trace", "write_chrome_trace"]
