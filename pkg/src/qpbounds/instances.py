"""Bundled 6x6 reference instance with independently computed bound values.

The reference values were cross-checked against an interior-point conic
solver and are quoted to the printed precision (4-5 significant digits),
so comparisons against them should use an absolute tolerance of about 1e-2
(1e-3 for the eigenvalue).
"""

from __future__ import annotations

import numpy as np

EXAMPLE1_Q = np.array(
    [
        [-11.0, -11.0, -7.0, -10.0, -8.0, -2.0],
        [-11.0, -5.0, -10.0, -9.0, -10.0, -7.0],
        [-7.0, -10.0, -10.0, -3.0, -6.0, -8.0],
        [-10.0, -9.0, -3.0, -8.0, -9.0, -10.0],
        [-8.0, -10.0, -6.0, -9.0, -8.0, -7.0],
        [-2.0, -7.0, -8.0, -10.0, -7.0, -6.0],
    ]
)

# Name -> (value, absolute tolerance).
REFERENCE_VALUES = {
    "dnn_l1": (2.0487, 1e-2),
    "dnn_l1_new": (2.0186, 1e-2),
    "sdp_x_k3": (6.3104, 1e-2),
    "dnn_l2l1_k3": (6.0964, 1e-2),
    "dnn_l2l1_new_le_k3": (5.9962, 1e-2),
    "dnn_l2l1_new_eq_k5": (7.048, 1e-2),
    "lambda_max": (7.0857, 1e-3),
}
