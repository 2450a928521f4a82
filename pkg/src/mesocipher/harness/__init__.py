from .rng import RngStream

__all__ = ["RngStream"]
