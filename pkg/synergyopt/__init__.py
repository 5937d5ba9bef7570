"""synergyopt - actuation-parameter design for underactuated tendon-driven hands."""

__version__ = "0.1.0"
