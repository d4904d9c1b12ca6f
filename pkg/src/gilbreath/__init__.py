"""Blockwise verification of the Gilbreath conjecture over the primes.

The difference triangle over the prime sequence is verified slice by slice
with overlapping blocks, and the step count of far larger ranges is
anticipated from first occurrences of record prime gaps.
"""

from .errors import (
    GapOverflowError,
    GapTableError,
    GilbreathError,
    OverlapExhaustedError,
    RangeTooLargeError,
    ResultLogError,
    RowExhaustedError,
    StepBudgetExhaustedError,
)
from .pipeline import (
    SliceResult,
    SliceSpec,
    VerificationReport,
    estimate_work,
    plan_slices,
    process_slice,
    read_result_log,
    run_verification,
    validate_stitching,
)
from .predictor import (
    GapRecord,
    GapTable,
    PredictionRecord,
    local_g_prime,
    parse_gap_table,
    predict_table,
    window_sensitivity_check,
)
from .primes import (
    PrimeBlock,
    is_prime,
    next_prime,
    prev_prime,
    primes_in_range,
    window_before_after,
)
from .stats import Histogram, StatsSummary, emit_svg, histogram, scan_max_gap, summarize
from .triangle import (
    GapRow,
    TriangleOutcome,
    abs_diff_step,
    full_triangle_oracle,
    gaps_from_primes,
    is_terminal,
    row_max,
    steps_to_terminal,
)

__version__ = "0.1.0"
