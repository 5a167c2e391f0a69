"""Replicate aggregation: mean, sample std and a 95% normal interval"""
import math
from dataclasses import dataclass
from typing import Any, Dict, Iterable, Optional

import numpy as np
from scipy.stats import norm

Z_95 = float(norm.ppf(0.975))


@dataclass(frozen=True)
class Summary:
    mean: Optional[float]
    std: Optional[float]
    ci_low: Optional[float]
    ci_high: Optional[float]
    n_defined: int
    n_total: int

    def to_dict(self) -> Dict[str, Any]:
        return {
            'mean': self.mean,
            'std': self.std,
            'ci_low': self.ci_low,
            'ci_high': self.ci_high,
            'n_defined': self.n_defined,
            'n_total': self.n_total,
        }


def summarize(values: Iterable[Optional[float]]) -> Summary:
    """None entries are skipped and counted; std and the interval need two defined values"""
    values = list(values)
    defined = np.array([v for v in values if v is not None and not math.isnan(v)], dtype=float)
    count = int(defined.shape[0])
    if count == 0:
        return Summary(None, None, None, None, 0, len(values))
    mean = float(defined.mean())
    if count == 1:
        return Summary(mean, None, None, None, 1, len(values))
    std = float(defined.std(ddof=1))
    half = Z_95 * std / math.sqrt(count)
    return Summary(mean, std, mean - half, mean + half, count, len(values))
