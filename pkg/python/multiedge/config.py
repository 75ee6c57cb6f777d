import dataclasses
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from .errors import ConfigError

# `lambda` is a keyword, so the field is spelled `lambda_` but read and
# written as `lambda`.
_ALIASES = {"lambda": "lambda_"}

# Every randomized step draws from its own child of `seed`, spawned in this order.
SEED_STREAMS = (
    "search_start",
    "multistart",
    "recover_starts",
    "pareto_samples",
    "correlation_samples",
    "metacluster_samples",
)


@dataclass(frozen=True)
class SearchConfig:
    """Optimizer and pipeline parameters shared by every search."""

    seed: int = 0
    n_samples: int = 50
    n_starts: int = 8
    initial_step: float = 0.25
    step_tolerance: float = 1e-4
    max_evaluations: int = 5000
    contraction: float = 0.5
    lambda_: float = 1.0
    steepness: float = 1.0

    def __post_init__(self):
        if self.n_samples < 1:
            raise ConfigError(f"n_samples must be at least 1, got {self.n_samples}")
        if self.n_starts < 1:
            raise ConfigError(f"n_starts must be at least 1, got {self.n_starts}")
        if self.initial_step <= 0:
            raise ConfigError(f"initial_step must be positive, got {self.initial_step}")
        if self.step_tolerance <= 0:
            raise ConfigError(
                f"step_tolerance must be positive, got {self.step_tolerance}"
            )
        if self.step_tolerance >= self.initial_step:
            raise ConfigError(
                f"step_tolerance ({self.step_tolerance}) must be smaller than "
                f"initial_step ({self.initial_step})"
            )
        if not 0 < self.contraction < 1:
            raise ConfigError(f"contraction must lie in (0, 1), got {self.contraction}")
        if self.max_evaluations < 0:
            raise ConfigError(
                f"max_evaluations must not be negative, got {self.max_evaluations}"
            )
        if self.lambda_ < 0:
            raise ConfigError(f"lambda must not be negative, got {self.lambda_}")
        if self.steepness <= 0:
            raise ConfigError(f"steepness must be positive, got {self.steepness}")

    @classmethod
    def from_options(cls, options):
        """
        Build a config from a mapping of option names to values.

        Values may be strings (as read from a key=value file or the command
        line); they are coerced to the type of the matching field.
        """
        options = {_ALIASES.get(key, key): value for key, value in options.items()}
        known = {field.name: field for field in fields(cls)}
        unknown = sorted(set(options) - set(known))
        if unknown:
            raise ConfigError(f"Unknown configuration keys: {', '.join(unknown)}")
        values = {}
        for name, field in known.items():
            options.setdefault(name, field.default)
            values[name] = _coerce(name, field.type, options[name])
        return cls(**values)

    def replace(self, **changes):
        changes = {_ALIASES.get(key, key): value for key, value in changes.items()}
        return dataclasses.replace(self, **changes)

    def as_dict(self):
        return {
            _option_name(field.name): getattr(self, field.name) for field in fields(self)
        }

    def dump(self):
        return "".join(f"{key}={value!r}\n" for key, value in self.as_dict().items())

    def seed_sequence(self, stream):
        if stream not in SEED_STREAMS:
            raise ConfigError(
                f"Unknown seed stream {stream!r}; expected one of {', '.join(SEED_STREAMS)}"
            )
        children = np.random.SeedSequence(self.seed).spawn(len(SEED_STREAMS))
        return children[SEED_STREAMS.index(stream)]


def _option_name(field_name):
    for option, name in _ALIASES.items():
        if name == field_name:
            return option
    return field_name


def _coerce(name, annotation, value):
    kind = {"int": int, "float": float}.get(annotation, annotation)
    if isinstance(value, kind) and not isinstance(value, bool):
        return value
    try:
        if kind is int:
            as_float = float(value)
            if not as_float.is_integer():
                raise ValueError(value)
            return int(as_float)
        return kind(value)
    except (TypeError, ValueError):
        raise ConfigError(
            f"Couldn't convert {_option_name(name)} ({value!r}) to {kind.__name__}"
        ) from None


def parse_config(text, source=None):
    """Parse `key=value` lines; blank lines and `#` comments are ignored."""
    options = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep or not key.strip():
            where = f"{source}: " if source else ""
            raise ConfigError(f"{where}Line {number}: expected key=value, got {raw!r}")
        options[key.strip()] = value.strip()
    return SearchConfig.from_options(options)


def load_config(path):
    path = Path(path)
    return parse_config(path.read_text(encoding="utf-8"), source=path)
