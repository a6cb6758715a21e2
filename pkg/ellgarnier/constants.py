"""Numerical defaults, fixture parameters and variable descriptions.  """
import numpy as np


# Numerical policy
default_eps = 1e-15  # relative truncation target of all q-products
truncation_safety = 1e-2  # products stop once |q^k z| < eps * safety
resonance_window = 6  # |a|, |b| checked for p^a q^b = 1
resonance_tolerance = 1e-8
distinct_tolerance = 1e-6  # minimal separation of singular points mod p^Z
forbidden_distance = 1e-3  # minimal separation of v, w from forbidden points
rank_tolerance = 1e-8  # rank-1 test of kernel_of/image_of
certificate_distance = 3e-2  # minimal separation of certificate samples

# Verification tolerances
tolerance_state = 1e-8
tolerance_identity = 1e-10
tolerance_gauge = 1e-7
tolerance_orbit = 1e-6
tolerance_frame = 1e-12
tolerance_base_point = 1e-8

# Reference state `fixture-1`: m=1, p=0.30, q=0.17, eta=0.90,
# u_k = 1.1 exp(2 pi i k/8) (1 + 0.03 k), kernels (1 : 0.4 + 0.1 k i).
fixture_m = 1
fixture_p = 0.30
fixture_q = 0.17
fixture_eta = 0.90
fixture_u = np.array(
    [1.1 * np.exp(2j * np.pi * k / 8) * (1 + 0.03 * k) for k in range(8)]
)
fixture_kernels = np.array([[1.0, 0.4 + 0.1j * k] for k in range(5)])

# Variable descriptions
variable_description = {
    "point": {
        "long_name": "index of the singular point u_k",
        "units": "1",
    },
    "kernel": {
        "long_name": "index of the kernel slot",
        "units": "1",
    },
    "coordinate": {
        "long_name": "homogeneous coordinate (x, y)",
        "units": "1",
    },
    "complex": {
        "long_name": "real and imaginary part",
        "units": "1",
    },
    "step": {
        "long_name": "orbit step",
        "units": "1",
    },
    "u": {
        "long_name": "singular points",
        "units": "1",
        "dims": ("point",),
    },
    "kernel_coordinates": {
        "long_name": "kernels of B at u_0 .. u_{2m+2}",
        "units": "1",
        "dims": ("kernel", "coordinate"),
    },
    "f": {
        "long_name": "kernel coordinate at u_3",
        "units": "1",
        "dims": ("coordinate",),
    },
    "g": {
        "long_name": "image coordinate at u_3",
        "units": "1",
        "dims": ("coordinate",),
    },
    "eta": {
        "long_name": "symmetry parameter eta",
        "units": "1",
    },
    "L": {
        "long_name": "square root of the product of the singular points",
        "units": "1",
    },
    "collision": {
        "long_name": "step stopped at a base point",
        "units": "1",
        "dims": ("step",),
    },
    "residual": {
        "long_name": "relative residual of a verification check",
        "units": "1",
        "dims": ("check",),
    },
    "lax_residual": {
        "long_name": "compatibility residual of the Lax pair",
        "units": "1",
        "dims": ("step",),
    },
    "state_residual": {
        "long_name": "largest residual of the normalization conditions",
        "units": "1",
        "dims": ("step",),
    },
}
