"""Zero-counting corroboration for power series whose factorial-weighted series is entire."""

__version__ = "0.1.0"
