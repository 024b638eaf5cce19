"""Experiment configuration files.

INI-style text with three sections: [system] holds the key-value system
definition (p, m, a, b, g0.., h0..), [run] the experiment parameters, and
[budgets] the resource caps. Anything omitted gets a default: moment order
1, coefficient limit min(p-1, 64), stream length 10**5, zero seed state.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass

from .errors import MissingField, ParseError
from .trisys import TriangularSystem, system_from_mapping

DEFAULT_N = 10**5
DEFAULT_LIMIT_CAP = 64
DEFAULT_TERM_BUDGET = 10**6
DEFAULT_STEP_BUDGET = 10**8
DEFAULT_ENUM_CAP = 10**7
DEFAULT_WORK_CAP = 10**8


@dataclass
class ExperimentConfig:
    system: dict[str, str]
    w0: tuple[int, ...] | None = None  # None means the zero state
    n: int = DEFAULT_N
    nu: tuple[int, ...] = (1,)
    limit: int | None = None  # None resolves to min(p-1, DEFAULT_LIMIT_CAP)
    term_budget: int = DEFAULT_TERM_BUDGET
    step_budget: int = DEFAULT_STEP_BUDGET
    enum_cap: int = DEFAULT_ENUM_CAP
    work_cap: int = DEFAULT_WORK_CAP

    def build(self) -> TriangularSystem:
        return system_from_mapping(self.system)

    def seed_state(self, sys: TriangularSystem) -> tuple[int, ...]:
        if self.w0 is None:
            return (0,) * (sys.m + 1)
        if len(self.w0) != sys.m + 1:
            raise MissingField(
                f"w0 needs {sys.m + 1} components, got {len(self.w0)}"
            )
        p = sys.field.p
        return tuple(x % p for x in self.w0)

    def resolved_limit(self, p: int) -> int:
        if self.limit is not None:
            return self.limit
        return min(p - 1, DEFAULT_LIMIT_CAP)


def _parse_int(raw: str, where: str) -> int:
    try:
        return int(raw.strip(), 0)
    except ValueError:
        raise ParseError(f"{where} must be an integer, got {raw!r}") from None


def _parse_int_list(raw: str, where: str) -> tuple[int, ...]:
    parts = [s for s in raw.replace(",", " ").split() if s]
    if not parts:
        raise ParseError(f"{where} must hold at least one integer")
    return tuple(_parse_int(s, where) for s in parts)


def parse_config(text: str) -> ExperimentConfig:
    """Parse config text; unknown keys are rejected so typos fail loudly."""
    cp = configparser.ConfigParser(interpolation=None)
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ParseError(str(exc), line=getattr(exc, "lineno", None)) from None
    if not cp.has_section("system"):
        raise MissingField("config needs a [system] section")
    cfg = ExperimentConfig(system=dict(cp.items("system")))

    run = dict(cp.items("run")) if cp.has_section("run") else {}
    budgets = dict(cp.items("budgets")) if cp.has_section("budgets") else {}
    known_run = {"w0", "n", "nu", "l"}
    known_budgets = {"terms", "steps", "enum", "work"}
    for key in run:
        if key not in known_run:
            raise ParseError(f"unknown [run] key {key!r}")
    for key in budgets:
        if key not in known_budgets:
            raise ParseError(f"unknown [budgets] key {key!r}")

    if "w0" in run:
        raw = run["w0"].strip()
        cfg.w0 = None if raw.lower() == "zero" else _parse_int_list(raw, "w0")
    if "n" in run:
        cfg.n = _parse_int(run["n"], "n")
    if "nu" in run:
        cfg.nu = _parse_int_list(run["nu"], "nu")
    if "l" in run:
        cfg.limit = _parse_int(run["l"], "L")
    if "terms" in budgets:
        cfg.term_budget = _parse_int(budgets["terms"], "terms")
    if "steps" in budgets:
        cfg.step_budget = _parse_int(budgets["steps"], "steps")
    if "enum" in budgets:
        cfg.enum_cap = _parse_int(budgets["enum"], "enum")
    if "work" in budgets:
        cfg.work_cap = _parse_int(budgets["work"], "work")

    for name, value in (("n", cfg.n), ("term budget", cfg.term_budget),
                        ("step budget", cfg.step_budget), ("enum cap", cfg.enum_cap),
                        ("work cap", cfg.work_cap)):
        if value < 1:
            raise ParseError(f"{name} must be positive, got {value}")
    if cfg.limit is not None and cfg.limit < 1:
        raise ParseError(f"L must be positive, got {cfg.limit}")
    if any(v < 1 for v in cfg.nu):
        raise ParseError(f"nu values must be positive, got {cfg.nu}")
    return cfg


def load_config(path) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())
