import os
from datetime import timedelta
from typing import Optional

import humanize

try:
    import psutil
except ImportError:
    psutil = None


def available_parallelism() -> int:
    """Logical CPU count, falling back to os.cpu_count when psutil is missing."""
    count = None
    if psutil is not None:
        count = psutil.cpu_count(logical=True)
    if not count:
        count = os.cpu_count()
    return max(1, count or 1)


def resolve_jobs(jobs: Optional[int]) -> int:
    """Map a --jobs value (None or 0 meaning 'all') to a worker count."""
    if not jobs or jobs <= 0:
        return available_parallelism()
    return jobs


def format_count(value: int) -> str:
    """Helper to format big integer counts with thousands separators."""
    return humanize.intcomma(value)


def format_duration(seconds: float) -> str:
    """Helper to format wall time for summaries."""
    if seconds < 1:
        return f"{seconds * 1000:.0f} ms"
    return humanize.precisedelta(timedelta(seconds=seconds), minimum_unit="seconds", format="%0.1f")
