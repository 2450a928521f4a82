"""Mesoscopic coherent-state stream cipher and attacks on it."""
from .channel import ChannelModel, EveTap, eve_intercept, intercept_channel, transmit
from .cipher import SignalSequence, bob_decode, encode, otp_generate_and_wrap
from .keystream import SeedKey, expand_running_key, stream_xor
from .optics import Constellation, flip_probability, general_overlap, pair_overlap

__version__ = "0.1.0"

__all__ = [
    "ChannelModel", "Constellation", "EveTap", "SeedKey", "SignalSequence", "bob_decode",
    "encode", "eve_intercept", "expand_running_key", "flip_probability", "general_overlap",
    "intercept_channel", "otp_generate_and_wrap", "pair_overlap", "stream_xor", "transmit",
]
