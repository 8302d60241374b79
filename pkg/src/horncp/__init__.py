"""Change-point estimation by a likelihood-weighted walk on a horn-torus parameter space."""

from .altstats import cusum_profile, self_normalized_profile, self_normalized_statistic
from .detect import detect
from .likelihood import (delta_hat, log_likelihood_profile, mle_change_point,
                         pooled_sigma)
from .manifold import embed, loss, unembed, zero_pass_distance
from .simulation import (ScenarioConfig, monte_carlo_risk, parametric_bootstrap_risk,
                         scatter_cloud, simulate_series, zero_probability_curve)
from .types import (ChangePointEstimate, DegenerateScaleError, LogScoreProfile,
                    ManifoldPoint, NormalizedProfile, RiskReport, Series,
                    StationaryDistribution)
from .walk import (normalize_scores, proposed_change_point, stationary_distribution,
                   stationary_oracle)

__version__ = "0.1.0"
