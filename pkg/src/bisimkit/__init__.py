"""bisimkit: bisimulations, liftings, ranks, and tree isomorphism at desk scale."""

__version__ = "0.1.0"
