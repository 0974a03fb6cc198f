"""Decision support for planning migrations to post-quantum cryptography."""

__version__ = "0.1.0"
