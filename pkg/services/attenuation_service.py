"""
Attenuation functions a: [0, 1] -> [0, 1] and the survival map s(x) = x * a(x)
"""

import logging
import math
from typing import Union

import numpy as np

from errors import ParameterRangeError
from models import AttenuationFn, AttenuationKind

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

E = math.e
A1_SLOPE = 3.0 - E
# Below this |x - 1| the a2 ratio switches to its series
A2_SERIES_CUTOFF = 1e-6
RANGE_SLACK = 1e-12


class AttenuationService:
    """Evaluates attenuation functions on scalars or numpy arrays"""

    A1 = AttenuationFn(kind=AttenuationKind.A1)
    A2 = AttenuationFn(kind=AttenuationKind.A2)

    def constant(self, value: float) -> AttenuationFn:
        if not 0.0 <= value <= 1.0:
            raise ParameterRangeError(f"Constant attenuation must lie in [0, 1], got {value}")
        return AttenuationFn(kind=AttenuationKind.CONSTANT, value=value)

    def table(self, values) -> AttenuationFn:
        try:
            return AttenuationFn(kind=AttenuationKind.TABLE, table=[float(v) for v in values])
        except ValueError as e:
            raise ParameterRangeError(str(e))

    def parse_attenuation(self, text: str) -> AttenuationFn:
        """
        Parse an attenuation descriptor

        Args:
            text: 'a1', 'a2', 'const=<v>' or 'table=<v0,v1,...>'

        Returns:
            AttenuationFn
        """
        token = text.strip().lower()
        if token == "a1":
            return self.A1
        if token == "a2":
            return self.A2
        if token.startswith("const=") or token.startswith("constant="):
            raw = token.split("=", 1)[1]
            try:
                return self.constant(float(raw))
            except ValueError:
                raise ParameterRangeError(f"Bad constant attenuation value: {raw}")
        if token.startswith("table="):
            raw = token.split("=", 1)[1]
            try:
                values = [float(v) for v in raw.split(",") if v.strip()]
            except ValueError:
                raise ParameterRangeError(f"Bad attenuation table: {raw}")
            return self.table(values)
        raise ParameterRangeError(f"Unknown attenuation '{text}' (expected a1, a2, const=<v> or table=<...>)")

    @staticmethod
    def _a1(x: np.ndarray) -> np.ndarray:
        return (1.0 - A1_SLOPE * x) ** 2

    @staticmethod
    def _a2(x: np.ndarray) -> np.ndarray:
        t = x - 1.0
        out = np.empty_like(t)
        near = np.abs(t) < A2_SERIES_CUTOFF
        far = ~near
        tf = t[far]
        out[far] = tf ** 4 / (E ** 2 * (np.expm1(tf) - tf) ** 2)
        tn = t[near]
        out[near] = 4.0 / (E ** 2 * (1.0 + tn / 3.0 + tn ** 2 / 12.0) ** 2)
        return out

    @staticmethod
    def _table(values, x: np.ndarray) -> np.ndarray:
        grid = np.linspace(0.0, 1.0, len(values))
        return np.interp(x, grid, np.asarray(values, dtype=float))

    def evaluate(self, fn: AttenuationFn, x: ArrayLike) -> ArrayLike:
        """
        Evaluate a(x)

        Args:
            fn: Attenuation function
            x: Scalar or array with entries in [0, 1]

        Returns:
            a(x), same shape as x
        """
        scalar = np.ndim(x) == 0
        arr = np.atleast_1d(np.asarray(x, dtype=float))
        if arr.size and (arr.min() < -RANGE_SLACK or arr.max() > 1.0 + RANGE_SLACK):
            raise ParameterRangeError(f"Attenuation argument outside [0, 1]: [{arr.min()}, {arr.max()}]")
        arr = np.clip(arr, 0.0, 1.0)

        if fn.kind == AttenuationKind.A1:
            out = self._a1(arr)
        elif fn.kind == AttenuationKind.A2:
            out = self._a2(arr)
        elif fn.kind == AttenuationKind.CONSTANT:
            out = np.full_like(arr, float(fn.value if fn.value is not None else 1.0))
        else:
            out = self._table(fn.table, arr)

        return float(out[0]) if scalar else out

    def survival(self, fn: AttenuationFn, x: ArrayLike) -> ArrayLike:
        """s(x) = x * a(x), the probability an edge of value x survives"""
        a = self.evaluate(fn, x)
        if np.ndim(x) == 0:
            return float(x) * a
        return np.asarray(x, dtype=float) * a


# Global attenuation service instance
attenuation_service = AttenuationService()
