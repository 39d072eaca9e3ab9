"""Measured transmission matrices at the working point kappa_tot / 2 kappa_0 = 2.2."""

import numpy as np

M_PLUS_3 = np.array(
    [
        [0.030, 0.460, 0.024, 0.133],
        [0.037, 0.057, 0.486, 0.038],
        [0.011, 0.101, 0.068, 0.698],
        [0.463, 0.039, 0.234, 0.055],
    ]
)

M_MINUS_3 = np.array(
    [
        [0.063, 0.072, 0.021, 0.394],
        [0.487, 0.045, 0.122, 0.016],
        [0.029, 0.379, 0.066, 0.274],
        [0.108, 0.005, 0.647, 0.020],
    ]
)

NO_ATOM = np.array(
    [
        [0.000, 0.014, 0.000, 0.572],
        [0.012, 0.008, 0.533, 0.025],
        [0.000, 0.539, 0.075, 0.252],
        [0.583, 0.016, 0.183, 0.027],
    ]
)

MATRICES = {"m+3": M_PLUS_3, "m-3": M_MINUS_3, "none": NO_ATOM}
