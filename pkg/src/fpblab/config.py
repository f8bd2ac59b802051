"""
Desk-scale budgets for the exact engines.

Budgets are configuration, not constants: every engine entry point takes a
`budget` override, and the environment variable FPBL_BUDGET can raise or
lower them globally, e.g.

    FPBL_BUDGET="poly=3000,eval=20000,columns=800"

Keys: poly (full polynomial series), eval (fixed-q exact series), columns
(exact column extraction), enum (avoider enumeration cap), enum_plain
(unrestricted enumeration cap).
"""
from __future__ import annotations

import os

DEFAULT_BUDGETS = {
    "poly": 1500,
    "eval": 10_000,
    "columns": 400,
    "enum": 12,
    "enum_plain": 10,
}


class BudgetExceededError(ValueError):
    """An exact-computation request exceeds the configured budget."""


def budgets() -> dict[str, int]:
    """Current budgets: defaults overlaid with FPBL_BUDGET (read each call)."""
    out = dict(DEFAULT_BUDGETS)
    raw = os.environ.get("FPBL_BUDGET", "")
    for item in raw.split(","):
        item = item.strip()
        if not item:
            continue
        key, _, value = item.partition("=")
        key = key.strip()
        if key not in out:
            raise ValueError(f"unknown FPBL_BUDGET key {key!r} (known: {sorted(out)})")
        out[key] = int(value)
    return out


def check_budget(kind: str, requested: int, override: int | None = None, hint: str = "") -> None:
    limit = override if override is not None else budgets()[kind]
    if requested > limit:
        msg = f"requested {kind} size {requested} exceeds budget {limit}"
        if hint:
            msg += f"; {hint}"
        raise BudgetExceededError(msg)
