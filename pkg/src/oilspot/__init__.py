"""oilspot: locate a component in a frame, crop it, enhance it, classify leak/non-leak."""

__version__ = "0.1.0"
