"""Exact simulation of stroboscopic QND measurements on two atomic ensembles."""

__version__ = "0.1.0"
