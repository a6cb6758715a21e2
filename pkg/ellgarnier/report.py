"""Structured verification reports.

A :class:`Report` collects named checks, each with a residual and the
tolerance it is compared against. Reports never raise on a failed check;
callers decide what a failure means (the command line maps it to exit
status 1).

**Example**

>>> from ellgarnier.report import Report
>>> report = Report("demo")
>>> report.add("identity", 1e-12, tolerance=1e-8)
>>> report.add("kernel_0", 1e-3, tolerance=1e-8)
>>> report.passed
False
>>> report.failed_checks()
['kernel_0']
"""
import logging

import numpy as np

from ellgarnier.component import Component


__all__ = [
    "Report",
]

logger = logging.getLogger(__name__)


class Report(Component):
    """Ordered collection of verification checks."""

    def __init__(self, title, tolerance=None):
        """
        Parameters:
            title (str): Name of the verified object (stored in outputs).
            tolerance (float): Default tolerance of added checks.
        """
        self.title = title
        self.tolerance = tolerance
        self._checks = {}

    def add(self, name, residual, tolerance=None):
        """Add (or replace) a check.

        A residual that is ``nan`` never passes.
        """
        tolerance = self.tolerance if tolerance is None else tolerance
        if tolerance is None:
            raise ValueError(f"No tolerance given for check `{name}`.")

        residual = float(residual)
        passed = bool(np.isfinite(residual) and residual <= tolerance)
        self._checks[name] = (residual, float(tolerance), passed)

        logger.debug(f"{self.title}: {name} residual={residual:.3e} passed={passed}")
        self._update_variables()

    def merge(self, other, prefix=""):
        """Copy all checks of another report, optionally prefixing their names."""
        for name, (residual, tolerance, _) in other.checks.items():
            self.add(f"{prefix}{name}", residual, tolerance)

    def _update_variables(self):
        self.coords = {"check": list(self._checks)}
        residual, tolerance, passed = (
            np.array(values) for values in zip(*self._checks.values())
        )
        self["residual"] = (("check",), residual)
        self["tolerance"] = (("check",), tolerance)
        self["passed"] = (("check",), passed)

    @property
    def checks(self):
        """Dictionary ``{name: (residual, tolerance, passed)}``."""
        return dict(self._checks)

    @property
    def passed(self):
        return all(passed for _, _, passed in self._checks.values())

    @property
    def max_residual(self):
        """Largest residual, ``nan`` if any check has a ``nan`` residual."""
        residuals = [residual for residual, _, _ in self._checks.values()]
        if np.any(np.isnan(residuals)):
            return np.nan
        return max(residuals, default=0.0)

    def failed_checks(self):
        return [name for name, (_, _, passed) in self._checks.items() if not passed]

    def __getitem__(self, key):
        if key in self._checks:
            return self._checks[key][0]
        return super().__getitem__(key)

    def to_dict(self):
        """Return a JSON-ready dictionary of the report."""
        return {
            "title": self.title,
            "passed": self.passed,
            "checks": [
                {
                    "name": name,
                    "residual": residual,
                    "tolerance": tolerance,
                    "passed": passed,
                }
                for name, (residual, tolerance, passed) in self._checks.items()
            ],
        }
