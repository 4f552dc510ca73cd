"""Types used throughout CPROJ

Every tensor is a numpy object array of exact :class:`~cproj.scalar.Scalar`
entries.

Note:
    ``m`` is the dimension of the frame the array refers to (``2n - 1`` on a
    contact patch, ``2n`` on its ambient space) and ``h`` the rank ``2n - 2``
    of the contact distribution. Tractor arrays have rank ``N = 2n``.
"""

from typing import Literal

import numpy as np
from jaxtyping import Shaped

ScalarArray = Shaped[np.ndarray, "..."]
ObjM = Shaped[np.ndarray, "m"]
ObjMxM = Shaped[np.ndarray, "m m"]
ObjMxMxM = Shaped[np.ndarray, "m m m"]
ObjMxMxMxM = Shaped[np.ndarray, "m m m m"]
ObjH = Shaped[np.ndarray, "h"]
ObjHxH = Shaped[np.ndarray, "h h"]
ObjHxHxH = Shaped[np.ndarray, "h h h"]
ObjHxHxHxH = Shaped[np.ndarray, "h h h h"]
ObjN = Shaped[np.ndarray, "N"]
ObjNxN = Shaped[np.ndarray, "N N"]

# slot variance of a frame tensor, one character per slot: "u" upper, "d" lower
Variance = str
Status = Literal["pass", "fail", "skipped", "info"]
