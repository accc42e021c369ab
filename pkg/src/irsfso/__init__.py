"""2D link-level simulator for IRS-assisted free-space optical links."""
__version__ = "0.1.0"
