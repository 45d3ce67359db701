"""OOSL frontend: parsing and fact extraction."""

from .extractor import ExtractionResult, ResolutionWarning, extract
from .parser import parse_file, parse_files

__all__ = ["ExtractionResult", "ResolutionWarning", "extract", "parse_file",
           "parse_files"]
