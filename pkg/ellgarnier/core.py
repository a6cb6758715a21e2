"""Orbits of the elliptic Painlevé equation. """
import logging

import numpy as np
import xarray as xr

from ellgarnier import __version__, constants, netcdf, statefile, utils
from ellgarnier.errors import BasePointCollision, EllGarnierError
from ellgarnier.garnier import GarnierState
from ellgarnier.painleve import (
    PainleveState,
    lax_certificate,
    normalize,
    step,
    verify_painleve,
)

logger = logging.getLogger(__name__)

__all__ = [
    "Orbit",
]


class Orbit:
    """Iterate the elliptic Painlevé equation and certify every step.

    Examples:
        Compute and store ten steps starting from the reference state:

        >>> import ellgarnier
        >>> orbit = ellgarnier.Orbit(ellgarnier.garnier.fixture(), steps=10)
        >>> orbit.run()
        >>> len(orbit.records)
        10

    """

    def __init__(
        self,
        state,
        steps,
        outfile=None,
        experiment="orbit",
        logevery=1,
        tolerance=constants.tolerance_orbit,
        samples=5,
        seed=0,
        method="closed",
        metadata=None,
    ):
        """Set up an orbit.

        Parameters:

            state (PainleveState or GarnierState): Initial state. Garnier
                states of order ``m = 1`` are normalized first.

            steps (int): Number of steps.

            outfile (str): Output file. Files ending on ``.nc`` are written
                as netCDF archive (step by step), all others as
                line-delimited JSON after the run.

            experiment (str): Experiment description (stored in outputs).

            logevery (int): Log the progress at every nth step.
                ``None`` disables the progress messages.

            tolerance (float): Tolerance of the Lax certificate and of the
                normalized state checks.

            samples (int): Number of sample points per certificate.

            seed (int): Seed of all sample points.

            method (str): ``"closed"`` or ``"pipeline"``, see
                :func:`ellgarnier.painleve.step`.

            metadata (dict): Additional header entries of the JSON output.
        """
        if isinstance(state, GarnierState):
            state = normalize(state)
        self.state = utils.return_if_type(state, "state", PainleveState, None)

        if steps < 0:
            raise ValueError(f"Number of steps has to be >= 0, got {steps}.")

        self.initial = self.state
        self.steps = int(steps)
        self.outfile = outfile
        self.experiment = experiment
        self.logevery = logevery
        self.tolerance = tolerance
        self.samples = samples
        self.seed = seed
        self.method = method
        self.metadata = {} if metadata is None else dict(metadata)

        self.niter = 0
        self.records = []
        self.collision = None
        self.nchandler = None

        logging.info("Created Orbit object:\n{}".format(self))

    def __repr__(self):
        retstr = "{}(\n".format(self.__class__.__name__)
        # Loop over all public object attributes.
        for a in filter(lambda k: not k.startswith("_"), self.__dict__):
            if a in ("records", "initial"):
                continue
            retstr += "    {}={},\n".format(a, getattr(self, a))
        retstr += ")"

        return retstr

    @property
    def passed(self):
        """``True`` if all steps were computed and certified."""
        return self.collision is None and all(r["passed"] for r in self.records)

    def header(self):
        return {
            "experiment": self.experiment,
            "steps": self.steps,
            "seed": self.seed,
            "tolerance": self.tolerance,
            "method": self.method,
            "version": __version__,
            "initial": self.initial.to_dict(),
            **self.metadata,
        }

    def _record(
        self, state, lax_residual=None, report=None, collision=None, error=None
    ):
        state_residual = None if report is None else report.max_residual
        passed = (
            collision is None
            and error is None
            and report is not None
            and report.passed
            and lax_residual is not None
            and lax_residual <= self.tolerance
        )
        return {
            "step": self.niter + 1,
            "u": utils.complex_array_to_pairs(state.u),
            "eta": utils.complex_to_pair(state.base.eta),
            "L": utils.complex_to_pair(state.L),
            "f": utils.affine_display(state.f),
            "g": utils.affine_display(state.g),
            "lax_residual": lax_residual,
            "state_residual": state_residual,
            "passed": passed,
            "collision": collision,
            "error": error,
            "state": state.to_dict(),
        }

    def check_if_write(self):
        """Check if the current step is appended to a netCDF archive."""
        return self.outfile is not None and str(self.outfile).endswith(".nc")

    def _append(self, record, state):
        self.records.append(record)

        if self.check_if_write():
            if self.nchandler is None:
                self.nchandler = netcdf.NetcdfHandler(filename=self.outfile, orbit=self)

            self.nchandler.write(
                state,
                record["lax_residual"],
                record["state_residual"],
                collision=record["collision"] is not None,
            )

    def run(self):
        """Run the orbit until all steps are done or a base point is hit."""
        logger.info("Start orbit run.")

        while self.niter < self.steps:
            if self.logevery is not None and self.niter % self.logevery == 0:
                logger.info(f"Enter step {self.niter}.")

            try:
                after = step(self.state, self.method)
            except BasePointCollision as exc:
                logger.warning(f"Stop at step {self.niter}: {exc}")
                self.collision = str(exc)
                self._append(self._record(self.state, collision=str(exc)), self.state)
                break

            report = verify_painleve(
                after, self.tolerance, seed=self.seed, n=self.samples
            )
            try:
                lax = lax_certificate(
                    self.state,
                    seed=self.seed,
                    n=self.samples,
                    method=self.method,
                    image=after,
                )
            except EllGarnierError as exc:
                logger.warning(f"No Lax certificate at step {self.niter}: {exc}")
                record = self._record(after, report=report, error=str(exc))
            else:
                record = self._record(after, lax, report)
                if not record["passed"]:
                    logger.warning(
                        f"Step {self.niter} exceeds tolerance: lax={lax:.3e}, "
                        f"state={report.max_residual:.3e}."
                    )

            self._append(record, after)
            self.state = after
            self.niter += 1
        else:
            logger.info("Stop. Reached number of steps.")

        if self.outfile is not None:
            self.write()

    def write(self, outfile=None):
        """Write the orbit to ``outfile``.

        netCDF archives are written during :meth:`run`; calling this method
        for a ``.nc`` file without any step creates an empty archive.
        """
        outfile = self.outfile if outfile is None else outfile

        if str(outfile).endswith(".nc"):
            if self.nchandler is None:
                self.nchandler = netcdf.NetcdfHandler(filename=outfile, orbit=self)
            return

        statefile.write_records(self.records, self.header(), path=outfile)

    def to_dataset(self):
        """Return the recorded steps as `xarray.Dataset`."""
        states = [statefile.state_from_dict(r["state"]) for r in self.records]
        sizes = {"point": 8, "coordinate": 2}

        def stacked(values, *dims):
            shape = (len(states), *(sizes[d] for d in dims))
            data = np.array(values, dtype=complex).reshape(shape)
            return (("step", *dims, "complex"), utils.split_complex(data))

        def residual(key):
            return (
                ("step",),
                np.array([np.nan if r[key] is None else r[key] for r in self.records]),
            )

        dataset = xr.Dataset(
            coords={
                "step": [r["step"] for r in self.records],
                "point": np.arange(8),
                "coordinate": ["x", "y"],
                "complex": ["real", "imag"],
            },
            data_vars={
                "u": stacked([s.u for s in states], "point"),
                "eta": stacked([s.base.eta for s in states]),
                "L": stacked([s.L for s in states]),
                "f": stacked([s.f.vector() for s in states], "coordinate"),
                "g": stacked([s.g.vector() for s in states], "coordinate"),
                "lax_residual": residual("lax_residual"),
                "state_residual": residual("state_residual"),
                "collision": (
                    ("step",),
                    np.array([r["collision"] is not None for r in self.records]),
                ),
            },
            attrs={
                "experiment": self.experiment,
                "seed": self.seed,
                "tolerance": self.tolerance,
                "source": f"ellgarnier {__version__}",
            },
        )

        for key in dataset.variables:
            if key in constants.variable_description:
                desc = constants.variable_description[key]
                dataset[key].attrs = {k: v for k, v in desc.items() if k != "dims"}

        return dataset
