from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["DecayFit", "fit_loglog", "fit_line"]


@dataclass(frozen=True)
class DecayFit:
    """Least-squares line through (log x, log y) points.

    ``residual`` is the RMS of the fit residuals in log space.  ``x`` and
    ``y`` keep the raw (unlogged) points the fit was made from.
    """

    slope: float
    intercept: float
    residual: float
    x: tuple = ()
    y: tuple = ()
    base: float = float(np.e)

    def predict(self, x) -> np.ndarray:
        return self.base ** self.intercept * np.asarray(x, dtype=float) ** self.slope


def fit_line(u, v) -> tuple[float, float, float]:
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.size < 3:
        raise ValueError("a decay fit needs at least 3 points")
    slope, intercept = np.polyfit(u, v, 1)
    resid = float(np.sqrt(np.mean((v - (slope * u + intercept)) ** 2)))
    return float(slope), float(intercept), resid


def fit_loglog(x, y, base: float | None = None) -> DecayFit:
    """Fit ``log y = slope * log x + intercept``.

    With ``base=2`` the logs are base 2 (used for per-scale ``k`` sweeps
    where ``x = 2^k``); the slope is the same in any base.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(x <= 0) or np.any(y <= 0):
        raise ValueError("log-log fit needs positive data")
    log = np.log2 if base == 2 else np.log
    slope, intercept, resid = fit_line(log(x), log(y))
    return DecayFit(slope, intercept, resid, tuple(x.tolist()), tuple(y.tolist()),
                    2.0 if base == 2 else float(np.e))
