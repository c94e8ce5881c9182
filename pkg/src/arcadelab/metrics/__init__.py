"""Score normalization, aggregation and statistical comparison of agents."""

from .normalize import (
    DegenerateRangeError, ScoreDistribution, ScoreRange, aggregate_average, aggregate_median,
    baseline_range, inter_algorithm_scores, normalize, random_range, times_best,
)
from .stats import WelchResult, betainc, t_cdf, t_two_tailed_p, welch_statistic, welch_test
from .table import ScoreTable, paired_matrix, paired_summary, render_paired_matrix, write_value_table

__all__ = [
    "DegenerateRangeError", "ScoreDistribution", "ScoreRange", "aggregate_average", "aggregate_median",
    "baseline_range", "inter_algorithm_scores", "normalize", "random_range", "times_best",
    "WelchResult", "betainc", "t_cdf", "t_two_tailed_p", "welch_statistic", "welch_test",
    "ScoreTable", "paired_matrix", "paired_summary", "render_paired_matrix", "write_value_table",
]
