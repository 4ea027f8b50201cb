"""
Log-log slope fitting for scaling sweeps.
"""
import logging

import numpy as np
from scipy import stats

from utils.errors import FitError

logger = logging.getLogger(__name__)


class SlopeFit:
    """
    Result of an ordinary least-squares fit on log-log data.
    """

    def __init__(self, slope, intercept, stderr, points, r_squared):
        """
        Initialize a fit result.

        Args:
            slope: Fitted exponent
            intercept: Fitted log-intercept
            stderr: Standard error of the slope
            points: Number of points used after filtering
            r_squared: Coefficient of determination
        """
        self.slope = slope
        self.intercept = intercept
        self.stderr = stderr
        self.points = points
        self.r_squared = r_squared

    def confidence_interval(self, level=0.95):
        """
        Two-sided confidence interval for the slope.

        Args:
            level: Confidence level

        Returns:
            (low, high) tuple
        """
        dof = self.points - 2
        if dof <= 0 or self.stderr == 0.0:
            return (self.slope, self.slope)
        half = stats.t.ppf(0.5 + level / 2.0, dof) * self.stderr
        return (self.slope - half, self.slope + half)

    def to_dict(self):
        low, high = self.confidence_interval()
        return {
            "slope": self.slope,
            "intercept": self.intercept,
            "stderr": self.stderr,
            "ci_low": low,
            "ci_high": high,
            "points": self.points,
            "r_squared": self.r_squared,
        }

    def __str__(self):
        return f"slope {self.slope:.4f} +/- {self.stderr:.2e} ({self.points} points)"


def fit_slope(xs, ys, floor=0.0):
    """
    Fit log(y) = slope * log(x) + intercept.

    Args:
        xs: Abscissae
        ys: Ordinates
        floor: Points with y at or below this value are discarded

    Returns:
        SlopeFit
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.shape != ys.shape:
        raise FitError(f"x and y lengths differ: {xs.shape} vs {ys.shape}")

    keep = (xs > 0) & (ys > 0) & (ys > floor) & np.isfinite(xs) & np.isfinite(ys)
    dropped = int(xs.size - keep.sum())
    if dropped:
        logger.warning("Discarded %d point(s) that are non-positive or below the noise floor", dropped)
    if keep.sum() < 3:
        raise FitError(f"Need at least 3 positive points for a slope fit, got {int(keep.sum())}")

    log_x = np.log(xs[keep])
    log_y = np.log(ys[keep])
    result = stats.linregress(log_x, log_y)
    stderr = float(result.stderr) if np.isfinite(result.stderr) else 0.0
    return SlopeFit(
        slope=float(result.slope),
        intercept=float(result.intercept),
        stderr=stderr,
        points=int(keep.sum()),
        r_squared=float(result.rvalue ** 2),
    )
