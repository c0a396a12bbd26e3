"""Runtime-generic polar codes: construction, CRC, SC/SSC/list decoders and simulation."""

__version__ = "0.1.0"
