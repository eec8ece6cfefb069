"""Strategy laboratory for strict (1:b) Avoider-Enforcer H-games."""

__version__ = "0.1.0"
