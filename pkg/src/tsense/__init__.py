"""Time-transient RF water sensing toolkit.

Models the saline dielectric response, the stub-loaded microstrip sensor,
and the exponential concentration transients of a resonant water monitor,
and implements the solid/liquid detection pipeline driven by a scenario
simulator and a trace-analysis CLI.
"""

__version__ = "0.1.0"
