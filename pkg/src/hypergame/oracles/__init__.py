"""Independent reference computations used to cross-check the checker."""
from .nash import NeQuery, nash_oracle, nash_report, path_values, swsp_ne_oracle, swsp_report  # noqa: F401
from .sampling import MonteCarloResult, NonPositiveSamples, hoeffding_half_width, monte_carlo_prob  # noqa: F401
from .valueiter import value_iteration_until  # noqa: F401
