"""loop-squeezer: measurement-induced squeezing gates in a loop-based optical processor."""

from loop_squeezer.constants import VERSION

__all__ = ["VERSION"]
__version__ = VERSION
