import math
from typing import List

from pydantic import BaseModel, ConfigDict, Field, model_validator


class SinrReport(BaseModel):
    model_config = ConfigDict(frozen=True, ser_json_inf_nan="null")

    signal_power: float = Field(..., ge=0)
    interference_power: float = Field(..., ge=0)
    noise_power: float = Field(..., ge=0)
    window_interference_power: float = Field(0.0, ge=0, description="part of the interference inside the N_i/K_i window")
    sinr: float = Field(..., ge=0)
    sinr_db: float

    @classmethod
    def from_powers(
        cls,
        signal_power: float,
        interference_power: float,
        noise_power: float,
        window_interference_power: float = 0.0,
    ) -> "SinrReport":
        denominator = interference_power + noise_power
        sinr = signal_power / denominator if denominator > 0 else math.inf
        return cls(
            signal_power=signal_power,
            interference_power=interference_power,
            noise_power=noise_power,
            window_interference_power=window_interference_power,
            sinr=sinr,
            sinr_db=10 * math.log10(sinr) if sinr > 0 else -math.inf,
        )

    @property
    def window_share(self) -> float:
        if self.interference_power == 0:
            return 1.0
        return self.window_interference_power / self.interference_power


class CcdfCurve(BaseModel):
    """Pr(sample > threshold); keeps the raw counts so partial curves can be merged."""

    model_config = ConfigDict(frozen=True)

    thresholds_db: List[float]
    ccdf: List[float]
    exceed_counts: List[int]
    num_samples: int = Field(..., ge=1)

    @model_validator(mode="after")
    def _check_curve(self) -> "CcdfCurve":
        if not (len(self.thresholds_db) == len(self.ccdf) == len(self.exceed_counts)):
            raise ValueError("thresholds, probabilities and counts must have the same length")
        if any(b < a for a, b in zip(self.thresholds_db, self.thresholds_db[1:])):
            raise ValueError("thresholds must be ascending")
        if any(b > a for a, b in zip(self.ccdf, self.ccdf[1:])):
            raise ValueError("ccdf must be non-increasing")
        if any(p < 0 or p > 1 for p in self.ccdf):
            raise ValueError("ccdf values must lie in [0, 1]")
        return self

    def merge(self, other: "CcdfCurve") -> "CcdfCurve":
        if self.thresholds_db != other.thresholds_db:
            raise ValueError("cannot merge curves evaluated on different thresholds")
        counts = [a + b for a, b in zip(self.exceed_counts, other.exceed_counts)]
        total = self.num_samples + other.num_samples
        return CcdfCurve(
            thresholds_db=self.thresholds_db,
            ccdf=[c / total for c in counts],
            exceed_counts=counts,
            num_samples=total,
        )

    def quantile_db(self, probability: float) -> float:
        """Smallest threshold whose exceedance probability is at most `probability`."""
        for threshold, p in zip(self.thresholds_db, self.ccdf):
            if p <= probability:
                return threshold
        return math.inf
