"""Shared fixtures: the 20-study worked example and record builders."""

import numpy as np
import pytest

from bfmeta import build_record

# (id, t, n1, n2, paper 2logBF_g, paper 2logBF_jzs, paper w2_omega, paper w2_v)
TABLE3 = (
    (1, -0.22, 26, 27, -3.9, -3.1, 0.015, 0.022),
    (2, 0.50, 17, 15, -3.2, -2.5, 0.009, 0.013),
    (3, 2.58, 33, 32, 2.1, 2.5, 0.019, 0.026),
    (4, 0.71, 10, 10, -2.5, -1.9, 0.006, 0.008),
    (5, 3.6, 8, 8, 6.2, 5.4, 0.005, 0.004),
    (6, 0.00, 37, 29, -4.2, -3.3, 0.019, 0.027),
    (7, 0.82, 79, 86, -4.4, -3.6, 0.047, 0.069),
    (8, 0.77, 559, 63, -5.8, -3.9, 0.178, 0.095),
    (9, -0.08, 35, 38, -4.3, -3.4, 0.021, 0.030),
    (10, 1.72, 25, 25, -1.1, -0.5, 0.014, 0.020),
    (11, 0.86, 80, 37, -4.0, -3.1, 0.033, 0.042),
    (12, 2.19, 187, 177, -1.1, -0.3, 0.104, 0.150),
    (13, 2.68, 153, 89, 1.6, 2.4, 0.069, 0.093),
    (14, 1.44, 48, 54, -2.6, -1.8, 0.029, 0.042),
    (15, 1.21, 804, 138, -5.4, -3.8, 0.269, 0.198),
    (16, 1.35, 13, 10, -1.4, -1.0, 0.007, 0.009),
    (17, 0.11, 341, 70, -6.0, -4.5, 0.117, 0.097),
    (18, 1.84, 11, 9, 0.1, 0.2, 0.006, 0.007),
    (19, 0.00, 36, 42, -4.4, -3.5, 0.022, 0.032),
    (20, 0.51, 20, 17, -3.4, -2.6, 0.011, 0.015),
)

TABLE4 = {
    "meta_bf_g_P": (9.00, 90.1),
    "meta_bf_g_L": (9.64, 124.3),
    "meta_bf_g_D": (11.83, 372.1),
    "meta_bf_jzs": (12.75, 588.9),
}


@pytest.fixture(scope="session")
def table3_records():
    return [
        build_record(str(sid), t_stat=t, n1=n1, n2=n2)
        for sid, t, n1, n2, *_ in TABLE3
    ]


@pytest.fixture(scope="session")
def table3_arrays():
    t = np.array([row[1] for row in TABLE3])
    n1 = np.array([row[2] for row in TABLE3], dtype=float)
    n2 = np.array([row[3] for row in TABLE3], dtype=float)
    n = n1 + n2
    return {
        "t": t,
        "n": n,
        "nu": n - 2.0,
        "ss": n1 * n2 / n,
        "paper_bf_g": np.array([row[4] for row in TABLE3]),
        "paper_bf_jzs": np.array([row[5] for row in TABLE3]),
        "paper_w2_omega": np.array([row[6] for row in TABLE3]),
        "paper_w2_v": np.array([row[7] for row in TABLE3]),
    }
