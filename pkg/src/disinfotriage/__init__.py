"""Infrastructure-feature triage pipeline for suspected disinformation domains."""

__version__ = "0.1.0"

PIPELINE_VERSION = f"disinfotriage/{__version__}"
