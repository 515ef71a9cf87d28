"""FTIR characterization of hydrothermal-liquefaction biocrude and aqueous phase."""

__version__ = "0.1.0"
