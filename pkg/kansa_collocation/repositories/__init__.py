"""Output layer for Kansa collocation runs"""
from .results_repository import ResultsRepository, format_value, jsonable

__all__ = ["ResultsRepository", "format_value", "jsonable"]
