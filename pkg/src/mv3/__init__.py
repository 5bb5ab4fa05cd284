"""MV3 stream cipher and analysis labs."""
