import logging
from datetime import datetime

import netCDF4
import numpy as np

from ellgarnier import constants, __version__
from ellgarnier.utils import split_complex


__all__ = [
    "NetcdfHandler",
]

logger = logging.getLogger(__name__)


class NetcdfHandler:
    """A netCDF file handler for orbits of the elliptic Painlevé equation.

    Complex values are stored with a trailing ``complex`` dimension holding
    real and imaginary part. Points of the projective line are stored in
    homogeneous coordinates (dimension ``coordinate``), so points at
    infinity need no special value.

    The global attribute ``created`` holds the wall-clock time the file was
    opened, so two runs of the same orbit differ in this attribute only.
    All variables and the other attributes are reproducible for a fixed
    seed. The line-delimited JSON output carries no timestamp.

    Usage:
        >>> orbit = ellgarnier.Orbit(...)
        >>> nc = NetcdfHandler('orbit.nc', orbit)  # create output file
        >>> nc.write(state, lax_residual, state_residual)  # append one step

    """

    def __init__(self, filename, orbit):
        self.filename = filename
        self.orbit = orbit

        self.udim = "step"
        self.udim_size = 0

        self.create_file()

    def create_file(self):
        with netCDF4.Dataset(self.filename, mode="w") as root:
            root.setncatts(
                {
                    "title": self.orbit.experiment,
                    "created": datetime.now().strftime("%Y-%m-%d %H:%M:%S"),
                    "source": f"ellgarnier {__version__}",
                    "seed": self.orbit.seed,
                    "tolerance": self.orbit.tolerance,
                    "p": str(self.orbit.state.base.p),
                    "q": str(self.orbit.state.base.q),
                }
            )

            self.create_dimension(root, self.udim, None)
            self.create_dimension(root, "point", 8)
            self.create_dimension(root, "coordinate", 2)
            self.create_dimension(root, "complex", 2)

            self.create_variable(root, self.udim, (self.udim,), dtype="int32")
            self.create_variable(root, "u", (self.udim, "point", "complex"))
            self.create_variable(root, "eta", (self.udim, "complex"))
            self.create_variable(root, "L", (self.udim, "complex"))
            self.create_variable(root, "f", (self.udim, "coordinate", "complex"))
            self.create_variable(root, "g", (self.udim, "coordinate", "complex"))
            self.create_variable(root, "lax_residual", (self.udim,))
            self.create_variable(root, "state_residual", (self.udim,))
            self.create_variable(root, "collision", (self.udim,), dtype="int8")

        logger.debug(f'Created "{self.filename}".')

    def create_dimension(self, group, name, size):
        if name not in group.dimensions:
            group.createDimension(name, size)

        logger.debug(f'Created dimension "{name}".')

    def create_variable(self, group, name, dims, dtype="float64"):
        variable = group.createVariable(
            varname=name,
            datatype=dtype,
            dimensions=dims,
            zlib=True,
        )

        logger.debug(f'Created variable "{name}".')

        self.append_description(variable)

    def append_description(self, variable):
        desc = constants.variable_description.get(variable.name, {})

        for attribute_name, value in desc.items():
            if attribute_name == "dims":
                continue
            logger.debug(f'Added attribute "{attribute_name}" to "{variable.name}".')
            setattr(variable, attribute_name, value)

    def write(self, state, lax_residual, state_residual, collision=False):
        """Append one step of the orbit to the netCDF file."""
        index = self.udim_size

        with netCDF4.Dataset(self.filename, "a") as root:
            root[self.udim][index] = index + 1
            root["u"][index] = split_complex(state.u)
            root["eta"][index] = split_complex(state.base.eta)
            root["L"][index] = split_complex(state.L)
            root["f"][index] = split_complex(state.f.vector())
            root["g"][index] = split_complex(state.g.vector())
            root["lax_residual"][index] = _missing_as_nan(lax_residual)
            root["state_residual"][index] = _missing_as_nan(state_residual)
            root["collision"][index] = 1 if collision else 0

        self.udim_size += 1
        logger.debug(f'Appended step {self.udim_size} to "{self.filename}".')


def _missing_as_nan(value):
    return np.nan if value is None else value
