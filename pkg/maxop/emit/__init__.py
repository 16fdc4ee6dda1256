"""Запись отчётов CSV/JSON и SVG-графики."""

from .plots import convergence_plot, kernel_plot, profile_plot
from .writers import write_csv, write_json

__all__ = ["write_csv", "write_json", "profile_plot", "kernel_plot", "convergence_plot"]
