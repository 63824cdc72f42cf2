"""Size and search caps.

These are configuration: every function that enforces a cap takes an
explicit override, and the CLI exposes ``--cap``.
"""

from dataclasses import dataclass


@dataclass(frozen=True)
class Limits:
    ring_size: int = 4096      # largest tabulated ring
    field_order: int = 4       # largest q for matrix presets
    oracle_size: int = 64      # exhaustive ideal census
    search: int = 1_000_000    # monoid enumeration budget
    span: int = 200_000        # enumerated submodules (non prime-characteristic fallback)


DEFAULT = Limits()
