"""Plotting for result CSVs produced by the resqlearn command line.

Strictly file-to-file: these modules read the documented CSV schemas and
draw; no science is recomputed here.
"""

__version__ = "0.1.0"
