"""Aggregate statistics over slice results, histograms, and gap scans.

The interesting distribution is R = G/M per slice: across a full run it
concentrates around 0.83 with only a fraction of a percent of slices above
1, which is what makes record-gap prediction work. summarize() reproduces
those figures for any result log; histogram() and emit_svg() render the
distribution without any plotting dependency so output is byte-stable.
"""

import math
from dataclasses import dataclass

import numpy as np

from .fmt import decimal_string
from .primes import iter_prime_arrays

# Soft corridor around the known full-run figures (mean R 0.830, 99.2%
# of slices at or below 1). Desk-scale runs over >= 1e9 should land inside;
# a miss is a flag for investigation, not a hard failure.
CORRIDOR_MIN_MEAN_R = 0.75
CORRIDOR_MAX_MEAN_R = 0.95
CORRIDOR_MIN_SHARE = 0.95
CORRIDOR_RANGE_FLOOR = 10 ** 9

DEFAULT_BIN_WIDTH = 0.02


@dataclass(frozen=True)
class StatsSummary:
    count: int
    mean_g: float
    mean_r: float
    stddev_r: float  # population standard deviation
    share_r_le_1: float  # R == 1 counts as <= 1
    max_r: float


@dataclass(frozen=True)
class Histogram:
    bin_width: float
    lo: float
    bins: tuple  # ((lower_edge, count), ...)


def summarize(results):
    """Population statistics over the g and r of a result list."""
    results = list(results)
    if not results:
        raise ValueError("cannot summarize an empty result list")
    gs = [res.g for res in results]
    rs = [res.r for res in results]
    n = len(results)
    mean_r = sum(rs) / n
    return StatsSummary(
        count=n,
        mean_g=sum(gs) / n,
        mean_r=mean_r,
        stddev_r=math.sqrt(sum((x - mean_r) ** 2 for x in rs) / n),
        share_r_le_1=sum(1 for x in rs if x <= 1.0) / n,
        max_r=max(rs),
    )


def corridor_warnings(summary, range_width=None):
    """Soft checks against the known full-run behavior; returns warning
    strings, empty when everything is in the expected corridor."""
    if range_width is not None and range_width < CORRIDOR_RANGE_FLOOR:
        return []
    warnings = []
    if summary.share_r_le_1 < CORRIDOR_MIN_SHARE:
        warnings.append(
            f"share of R <= 1 is {summary.share_r_le_1:.4f}, "
            f"below the expected {CORRIDOR_MIN_SHARE}"
        )
    if not CORRIDOR_MIN_MEAN_R <= summary.mean_r <= CORRIDOR_MAX_MEAN_R:
        warnings.append(
            f"mean R {summary.mean_r:.4f} outside "
            f"[{CORRIDOR_MIN_MEAN_R}, {CORRIDOR_MAX_MEAN_R}]"
        )
    return warnings


def histogram(values, bin_width, lo=None):
    """Uniform right-open bins covering every input value.

    Bins start at floor(min) unless a smaller lo is given; a value equal to
    a bin edge lands in the bin opening at that edge, so counts always sum
    to len(values).
    """
    values = list(values)
    if not values:
        raise ValueError("cannot bin an empty value list")
    if bin_width <= 0:
        raise ValueError("bin_width must be positive")
    vmin, vmax = min(values), max(values)
    if lo is None:
        lo = float(math.floor(vmin))
    elif lo > vmin:
        raise ValueError(f"lo={lo} must not exceed the smallest value {vmin}")
    n_bins = int((vmax - lo) / bin_width) + 1
    counts = [0] * n_bins
    for v in values:
        counts[min(int((v - lo) / bin_width), n_bins - 1)] += 1
    bins = tuple((lo + i * bin_width, counts[i]) for i in range(n_bins))
    return Histogram(bin_width=bin_width, lo=lo, bins=bins)


def histogram_csv(hist):
    lines = ["bin_lower_edge,count"]
    for edge, count in hist.bins:
        lines.append(f"{edge:.6g},{count}")
    return "\n".join(lines) + "\n"


_SVG_W, _SVG_H = 800, 420
_MARGIN_L, _MARGIN_R, _MARGIN_T, _MARGIN_B = 60, 20, 40, 50


def emit_svg(hist, title, out):
    """Standalone SVG bar chart of a histogram; byte-deterministic.

    One rect per nonzero bin, simple axes with min/max labels, no external
    assets.
    """
    plot_w = _SVG_W - _MARGIN_L - _MARGIN_R
    plot_h = _SVG_H - _MARGIN_T - _MARGIN_B
    n = len(hist.bins)
    max_count = max((c for _, c in hist.bins), default=0)
    x_lo = hist.lo
    x_hi = hist.lo + n * hist.bin_width

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_SVG_W}" '
        f'height="{_SVG_H}" viewBox="0 0 {_SVG_W} {_SVG_H}">',
        f'<rect width="{_SVG_W}" height="{_SVG_H}" fill="white"/>',
        f'<text x="{_SVG_W // 2}" y="24" text-anchor="middle" '
        f'font-family="sans-serif" font-size="16">{_xml_escape(title)}</text>',
    ]
    if max_count > 0:
        bar_w = plot_w / n
        for i, (edge, count) in enumerate(hist.bins):
            if count == 0:
                continue
            h = plot_h * count / max_count
            x = _MARGIN_L + i * bar_w
            y = _MARGIN_T + plot_h - h
            parts.append(
                f'<rect x="{x:.2f}" y="{y:.2f}" width="{bar_w:.2f}" '
                f'height="{h:.2f}" fill="steelblue"/>'
            )
    ax_y = _MARGIN_T + plot_h
    parts += [
        f'<line x1="{_MARGIN_L}" y1="{ax_y}" x2="{_SVG_W - _MARGIN_R}" '
        f'y2="{ax_y}" stroke="black"/>',
        f'<line x1="{_MARGIN_L}" y1="{_MARGIN_T}" x2="{_MARGIN_L}" '
        f'y2="{ax_y}" stroke="black"/>',
        f'<text x="{_MARGIN_L}" y="{ax_y + 18}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="12">{x_lo:.6g}</text>',
        f'<text x="{_SVG_W - _MARGIN_R}" y="{ax_y + 18}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="12">{x_hi:.6g}</text>',
        f'<text x="{_MARGIN_L - 8}" y="{_MARGIN_T + 4}" text-anchor="end" '
        f'font-family="sans-serif" font-size="12">{max_count}</text>',
        f'<text x="{_MARGIN_L - 8}" y="{ax_y + 4}" text-anchor="end" '
        f'font-family="sans-serif" font-size="12">0</text>',
        "</svg>",
    ]
    data = "\n".join(parts) + "\n"
    with open(out, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(data)


def _xml_escape(text):
    return (
        str(text)
        .replace("&", "&amp;")
        .replace("<", "&lt;")
        .replace(">", "&gt;")
        .replace('"', "&quot;")
    )


def scan_max_gap(lo, hi):
    """Largest gap between consecutive primes in [lo, hi], with the lower
    prime of the first (hence smallest) gap attaining it."""
    best_gap = 0
    best_lower = None
    prev = None
    for arr in iter_prime_arrays(max(2, lo), hi + 1):
        if prev is not None:
            arr = np.concatenate([[prev], arr])
        if arr.size >= 2:
            gaps = np.diff(arr)
            i = int(np.argmax(gaps))
            if int(gaps[i]) > best_gap:
                best_gap = int(gaps[i])
                best_lower = int(arr[i])
        prev = int(arr[-1])
    if best_lower is None:
        raise ValueError(f"fewer than 2 primes in [{lo}, {hi}]")
    return best_gap, best_lower


def format_summary(summary):
    return "\n".join(
        [
            f"count={summary.count}",
            f"mean_g={decimal_string(summary.mean_g)}",
            f"mean_r={decimal_string(summary.mean_r)}",
            f"stddev_r={decimal_string(summary.stddev_r)}",
            f"share_r_le_1={decimal_string(summary.share_r_le_1)}",
            f"max_r={decimal_string(summary.max_r)}",
        ]
    )
