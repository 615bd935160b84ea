"""Array aliases shared across essrate."""

from collections.abc import Callable

import numpy as np
from numpy.typing import NDArray

Vector = NDArray[np.float64]
Matrix = NDArray[np.float64]
ComplexVector = NDArray[np.complex128]

ScalarFn = Callable[[float], float]
MatrixFn = Callable[[float], Matrix]
