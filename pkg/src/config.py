import dataclasses
import math
import re
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from dataclasses import dataclass, field
from pathlib import Path

from .utils.errors import ConfigError

ENVIRONMENTS = ("chain", "grid", "two_room", "random", "mountain_car")
DISCRETE_ENVIRONMENTS = ("chain", "grid", "two_room", "random")
BASES = ("tabular", "pvf", "fourier", "polynomial", "rbf")
DISCRETE_BASES = ("tabular", "pvf")
TD_LEARNERS = ("td", "mirror_td", "sparse_td", "composite_td")
Q_LEARNERS = ("q_learning", "mirror_q", "sparse_q", "composite_q")
LEARNERS = TD_LEARNERS + Q_LEARNERS
LINKS = ("euclidean", "pnorm", "entropy")
POLICIES = ("optimal", "uniform")

_KEY = re.compile(r"[A-Za-z][A-Za-z0-9_]*")
_BARE = re.compile(r"[A-Za-z_][A-Za-z0-9_.\-/]*")


@dataclass(frozen=True)
class ConfigField:
    """One config key: file name, attribute name, value type, default (None = required)."""

    key: str
    attr: str
    kind: type
    default: object = None
    hyper: bool = False


FIELDS = (
    # [environment]
    ConfigField("env", "env", str),
    ConfigField("gamma", "gamma", float, 0.9, hyper=True),
    ConfigField("nStates", "n_states", int, 5),
    ConfigField("nActions", "n_actions", int, 2),
    ConfigField("envSeed", "env_seed", int, 0),
    ConfigField("gridWidth", "grid_width", int, 10),
    ConfigField("gridHeight", "grid_height", int, 10),
    ConfigField("gridMap", "grid_map", str, ""),
    ConfigField("policy", "policy", str, "optimal"),
    # [basis]
    ConfigField("basis", "basis", str),
    ConfigField("basisSize", "basis_size", int, 50),
    ConfigField("normalizedLaplacian", "normalized_laplacian", bool, False),
    ConfigField("fourierOrder", "fourier_order", int, 4),
    ConfigField("polyDegree", "poly_degree", int, 2),
    ConfigField("rbfPerDim", "rbf_per_dim", int, 5),
    ConfigField("rbfWidth", "rbf_width", float, 0.0),
    ConfigField("noiseFeatures", "noise_features", int, 0),
    ConfigField("noiseSeed", "noise_seed", int, 0),
    # [learner]
    ConfigField("learner", "learner", str, hyper=True),
    ConfigField("link", "link", str, "pnorm", hyper=True),
    ConfigField("pKind", "p_kind", str, "decay", hyper=True),
    ConfigField("p", "p", float, 0.0, hyper=True),
    ConfigField("pHorizon", "p_horizon", int, 10000, hyper=True),
    ConfigField("egMass", "eg_mass", float, 0.0, hyper=True),
    ConfigField("alphaKind", "alpha_kind", str, "constant", hyper=True),
    ConfigField("alpha0", "alpha0", float, 0.1, hyper=True),
    ConfigField("alphaExponent", "alpha_exponent", float, 0.6, hyper=True),
    ConfigField("lam", "lam", float, 0.0, hyper=True),
    ConfigField("beta", "beta", float, 0.0, hyper=True),
    ConfigField("epsilon", "epsilon", float, 0.1, hyper=True),
    ConfigField("epsilonDecay", "epsilon_decay", float, 1.0, hyper=True),
    ConfigField("traceMode", "trace_mode", str, "standard", hyper=True),
    ConfigField("covarianceMode", "covariance_mode", str, "features", hyper=True),
    ConfigField("hFloor", "h_floor", float, 1e-6, hyper=True),
    ConfigField("divergenceLimit", "divergence_limit", float, 1e8),
    # [run]
    ConfigField("episodes", "episodes", int),
    ConfigField("maxSteps", "max_steps", int, 1000),
    ConfigField("trials", "trials", int, 1),
    ConfigField("baseSeed", "base_seed", int, 0),
    ConfigField("workers", "workers", int, 1),
    ConfigField("improveEvery", "improve_every", int, 0),
    # [IO]
    ConfigField("writeFrequency", "write_frequency", int, 0),
    ConfigField("logName", "log_name", str, "logfile"),
)

FIELDS_BY_KEY = {f.key: f for f in FIELDS}
HYPER_KEYS = tuple(f.key for f in FIELDS if f.hyper)


def parse_value(raw: str, line: int | None = None):
    """
    Parse the right-hand side of a `key = value` line.

    TOML scalars and arrays are parsed with tomllib; a bare identifier such as
    `td` is accepted as a string.

    Raises:
        ConfigError: If the value is neither valid TOML nor a bare identifier.
    """
    try:
        return tomllib.loads(f"v = {raw}")["v"]
    except tomllib.TOMLDecodeError:
        bare = raw.split("#", 1)[0].strip()
        if _BARE.fullmatch(bare):
            return bare
        raise ConfigError(f"cannot parse value {raw.strip()!r}", line)


def format_value(value) -> str:
    """Inverse of parse_value for the types used in config and header files."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return repr(value)
    if isinstance(value, str):
        return '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(format_value(v) for v in value) + "]"
    raise TypeError(f"cannot format value of type {type(value).__name__}")


def read_key_values(text: str) -> list[tuple[int, str, object]]:
    """
    Split flat `key = value` text into (line number, key, value) triples.

    Blank lines and `#` comment lines are skipped.

    Raises:
        ConfigError: Malformed line, invalid key, table header or duplicate key.
    """
    entries = []
    seen = {}
    for line_no, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if stripped.startswith("["):
            raise ConfigError("table headers are not supported; use flat `key = value` lines", line_no)
        if "=" not in stripped:
            raise ConfigError(f"expected `key = value`, got {stripped!r}", line_no)
        key, raw = stripped.split("=", 1)
        key = key.strip()
        if not _KEY.fullmatch(key):
            raise ConfigError(f"invalid key {key!r}", line_no)
        if key in seen:
            raise ConfigError(f"duplicate key {key!r} (first set on line {seen[key]})", line_no)
        seen[key] = line_no
        entries.append((line_no, key, parse_value(raw, line_no)))
    return entries


def coerce(spec: ConfigField, value, line: int | None = None):
    """Check `value` against the field type; ints are widened to float where needed."""
    if spec.kind is float and isinstance(value, int) and not isinstance(value, bool):
        return float(value)
    if spec.kind is int and isinstance(value, bool):
        raise ConfigError(f"key {spec.key!r} expects int, got bool", line)
    if not isinstance(value, spec.kind):
        raise ConfigError(f"key {spec.key!r} expects {spec.kind.__name__}, got {type(value).__name__}", line)
    return value


@dataclass(frozen=True)
class ExperimentConfig:
    """
    Validated experiment configuration.

    Attribute names are the snake_case forms of the camelCase file keys
    listed in FIELDS. Optional keys take their documented defaults.

    Example:
        config = load_config("input.toml")
        print(config.learner, config.episodes)
    """

    env: str
    gamma: float
    n_states: int
    n_actions: int
    env_seed: int
    grid_width: int
    grid_height: int
    grid_map: str
    policy: str
    basis: str
    basis_size: int
    normalized_laplacian: bool
    fourier_order: int
    poly_degree: int
    rbf_per_dim: int
    rbf_width: float
    noise_features: int
    noise_seed: int
    learner: str
    link: str
    p_kind: str
    p: float
    p_horizon: int
    eg_mass: float
    alpha_kind: str
    alpha0: float
    alpha_exponent: float
    lam: float
    beta: float
    epsilon: float
    epsilon_decay: float
    trace_mode: str
    covariance_mode: str
    h_floor: float
    divergence_limit: float
    episodes: int
    max_steps: int
    trials: int
    base_seed: int
    workers: int
    improve_every: int
    write_frequency: int
    log_name: str
    lines: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        self._validate()

    @property
    def is_q_learner(self) -> bool:
        return self.learner in Q_LEARNERS

    @property
    def is_discrete(self) -> bool:
        return self.env in DISCRETE_ENVIRONMENTS

    def raw(self) -> dict:
        """Resolved values keyed by file key, in FIELDS order."""
        return {f.key: getattr(self, f.attr) for f in FIELDS}

    def to_text(self) -> str:
        """Serialize to the `key = value` format; parse_config(to_text()) == self."""
        lines = ["# resolved experiment configuration"]
        lines += [f"{key} = {format_value(value)}" for key, value in self.raw().items()]
        return "\n".join(lines) + "\n"

    def with_values(self, values: dict) -> "ExperimentConfig":
        """Return a copy with some file keys replaced (used by sweeps)."""
        changes = {}
        for key, value in values.items():
            spec = FIELDS_BY_KEY.get(key)
            if spec is None:
                raise ConfigError(f"unknown key {key!r}")
            changes[spec.attr] = coerce(spec, value)
        return dataclasses.replace(self, **changes)

    def _error(self, key: str, message: str) -> ConfigError:
        return ConfigError(message, self.lines.get(key))

    def _choice(self, key: str, value: str, choices) -> None:
        if value not in choices:
            raise self._error(key, f"{key} must be one of {', '.join(choices)}; got {value!r}")

    def _validate(self):
        """
        Check ranges, identifiers and env/basis/learner compatibility.

        Raises:
            ConfigError: Citing the line of the offending key when known.
        """
        self._choice("env", self.env, ENVIRONMENTS)
        self._choice("basis", self.basis, BASES)
        self._choice("learner", self.learner, LEARNERS)
        self._choice("link", self.link, LINKS)
        self._choice("policy", self.policy, POLICIES)
        self._choice("pKind", self.p_kind, ("fixed", "decay"))
        self._choice("alphaKind", self.alpha_kind, ("constant", "robbins_monro"))
        self._choice("traceMode", self.trace_mode, ("standard", "literal"))
        self._choice("covarianceMode", self.covariance_mode, ("features", "gradient"))

        positive = {
            "episodes": self.episodes, "maxSteps": self.max_steps, "trials": self.trials,
            "workers": self.workers, "nStates": self.n_states, "nActions": self.n_actions,
            "gridWidth": self.grid_width, "gridHeight": self.grid_height, "basisSize": self.basis_size,
            "rbfPerDim": self.rbf_per_dim, "pHorizon": self.p_horizon,
        }
        for key, value in positive.items():
            if value < 1:
                raise self._error(key, f"{key} must be >= 1")

        nonnegative = {
            "fourierOrder": self.fourier_order, "polyDegree": self.poly_degree,
            "noiseFeatures": self.noise_features, "improveEvery": self.improve_every,
            "writeFrequency": self.write_frequency, "beta": self.beta, "egMass": self.eg_mass,
            "rbfWidth": self.rbf_width,
        }
        for key, value in nonnegative.items():
            if value < 0:
                raise self._error(key, f"{key} must be >= 0")

        if not 0.0 <= self.gamma < 1.0:
            raise self._error("gamma", "gamma must satisfy 0 <= gamma < 1")
        if not 0.0 <= self.lam <= 1.0:
            raise self._error("lam", "lam must be in [0, 1]")
        if not 0.0 <= self.epsilon <= 1.0:
            raise self._error("epsilon", "epsilon must be in [0, 1]")
        if not 0.0 < self.epsilon_decay <= 1.0:
            raise self._error("epsilonDecay", "epsilonDecay must be in (0, 1]")
        if self.alpha0 <= 0:
            raise self._error("alpha0", "alpha0 must be > 0")
        if self.alpha_kind == "robbins_monro" and not 0.5 < self.alpha_exponent <= 1.0:
            raise self._error("alphaExponent", "alphaExponent must be in (0.5, 1] for robbins_monro")
        if self.p != 0.0 and self.p <= 1.0:
            raise self._error("p", "p must be > 1 (or 0 for max(2, ln d))")
        if self.p_kind == "decay" and 0.0 < self.p < 2.0:
            raise self._error("p", "a decaying p schedule ends at 2 and needs p >= 2")
        if self.h_floor <= 0:
            raise self._error("hFloor", "hFloor must be > 0")
        if self.divergence_limit <= 0:
            raise self._error("divergenceLimit", "divergenceLimit must be > 0")

        if self.is_discrete and self.basis not in DISCRETE_BASES:
            raise self._error("basis", f"basis {self.basis!r} needs a continuous environment; use tabular or pvf")
        if not self.is_discrete and self.basis in DISCRETE_BASES:
            raise self._error("basis", f"basis {self.basis!r} needs a discrete environment")
        if self.noise_features > 0 and not self.is_discrete:
            raise self._error("noiseFeatures", "noise features need a discrete environment")
        if not self.is_discrete and not self.is_q_learner:
            raise self._error("learner", "TD learners evaluate a fixed policy and need a discrete environment")
        if self.improve_every > 0 and self.is_q_learner:
            raise self._error("improveEvery", "improveEvery applies to TD learners only")
        if self.write_frequency > 0 and self.env not in ("grid", "two_room"):
            raise self._error("writeFrequency", "value-function frames need a grid environment")


def parse_config(text: str) -> ExperimentConfig:
    """
    Parse and validate configuration text.

    Args:
        text (str): Flat `key = value` lines with `#` comments.

    Returns:
        ExperimentConfig: With defaults applied for every optional key.

    Raises:
        ConfigError: Unknown key, missing required key, type mismatch or an
            invalid value; the message names the offending line.
    """
    values = {}
    lines = {}
    for line_no, key, value in read_key_values(text):
        spec = FIELDS_BY_KEY.get(key)
        if spec is None:
            raise ConfigError(f"unknown key {key!r}", line_no)
        values[spec.attr] = coerce(spec, value, line_no)
        lines[key] = line_no

    for spec in FIELDS:
        if spec.attr in values:
            continue
        if spec.default is None:
            raise ConfigError(f"missing required key {spec.key!r}")
        values[spec.attr] = spec.default

    return ExperimentConfig(**values, lines=lines)


def load_config(filename: str | Path) -> ExperimentConfig:
    """
    Read and validate a configuration file.

    Raises:
        FileNotFoundError: If the file does not exist.
        ConfigError: See parse_config.
    """
    path = Path(filename)
    if not path.exists():
        raise FileNotFoundError(f"Config file not found: {filename}")
    return parse_config(path.read_text(encoding="utf-8"))
