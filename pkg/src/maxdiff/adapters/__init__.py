"""Expose the different adapters."""

from .csv_file import CSVParseError, MixedTypeError, ingest_csv

__all__ = ["CSVParseError", "MixedTypeError", "ingest_csv"]
