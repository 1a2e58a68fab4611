"""Exact computer algebra for planar blowup towers: resolving functions to
normal crossings, solving covering cocycles and additive Cousin data by
blowing up, and deciding triviality of rank-1 transition bundles, all over
exact rationals with replayable certificates."""

__version__ = "0.1.0"
