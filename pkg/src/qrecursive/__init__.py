"""q-recursive sequences: linear representations, spectra and asymptotics."""

__version__ = "0.1.0"
