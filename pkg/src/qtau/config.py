"""Validated run configuration shared by the CLI commands."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from pathlib import Path

from gmpy2 import mpq

from .cache import default_cache_dir
from .errors import UsageError

__all__ = ["CampaignConfig", "parse_rational", "model_step"]

MODELS = ("kw", "bgw")


def parse_rational(text: str, what: str = "value") -> mpq:
    try:
        return mpq(text)
    except (ValueError, TypeError, ZeroDivisionError):
        raise UsageError(f"{what} must be a rational like 3 or 1/4, got {text!r}") from None


def model_step(model: str) -> int:
    """Weight carried by one power of hbar: 3 for KW, 1 for BGW."""
    if model not in MODELS:
        raise UsageError(f"unknown model {model!r}; expected one of {MODELS}")
    return 3 if model == "kw" else 1


@dataclass
class CampaignConfig:
    command: str
    model: str | None = None
    max_weight: int | None = None
    hbar_order: int | None = None
    nu: str | None = None  # rational text, or None for symbolic
    beta: str | None = None
    nu_symbolic: bool = False
    beta_symbolic: bool = True
    cache_dir: Path | None = None
    report: Path | None = None
    threads: int = 1
    plot: bool = True

    def validate(self) -> "CampaignConfig":
        if self.threads < 1:
            raise UsageError("--threads must be >= 1")
        if self.max_weight is not None and not 0 <= self.max_weight <= 255:
            raise UsageError("--max-weight must lie in [0, 255]")
        if self.hbar_order is not None and self.hbar_order < 0:
            raise UsageError("--hbar-order must be >= 0")
        if self.model is not None:
            model_step(self.model)
        if self.nu is not None and self.nu_symbolic:
            raise UsageError("--nu and --nu-symbolic are exclusive")
        if self.beta is not None:
            if parse_rational(self.beta, "--beta") == 0:
                raise UsageError("--beta must be nonzero")
            self.beta_symbolic = False
        if self.nu is not None:
            parse_rational(self.nu, "--nu")
        if self.cache_dir is None:
            self.cache_dir = default_cache_dir()
        return self

    def resolve_orders(self, default_order: int | None = None) -> tuple[int, int]:
        """(hbar order, weight cap) made consistent for ``self.model``.

        Either may be omitted; the other is derived.  An order larger than
        the weight cap can support is rejected.
        """
        step = model_step(self.model)
        order, cap = self.hbar_order, self.max_weight
        if order is None and cap is None:
            order = default_order
        if order is None and cap is None:
            raise UsageError("give --order or --max-weight")
        if cap is None:
            cap = order * step
        if order is None:
            order = cap // step
        if order * step > cap:
            raise UsageError(f"hbar order {order} needs weight cap {order * step} for {self.model}, got {cap}")
        if cap > 255:
            raise UsageError("weight cap above 255 is not representable")
        return order, cap

    def nu_value(self):
        if self.nu_symbolic:
            return "symbolic"
        return parse_rational(self.nu, "--nu") if self.nu is not None else mpq(0)

    def beta_value(self):
        if self.beta_symbolic or self.beta is None:
            return "symbolic"
        return parse_rational(self.beta, "--beta")

    def describe(self) -> dict:
        out = {}
        for k, v in asdict(self).items():
            if v is None or k in ("report", "cache_dir", "threads", "plot"):
                continue
            out[k] = v
        return out
