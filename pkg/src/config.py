import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Optional

# --- Configuration ---
PACKAGE_DIR = Path(__file__).resolve().parent
SCHEMA_PATH = PACKAGE_DIR / "schema" / "params.schema.json"
SAMPLES_DIR = PACKAGE_DIR / "samples"
REPORTS_DIR = Path("reports")

VERSION = "0.1.0"

DEFAULT_DIGITS = 50
DEFAULT_K = {"rank0to1": 3, "rank1to2": 2}
# Residual budget: |residual| <= RESIDUAL_BUDGET * (change of the residual when one more order is kept).
RESIDUAL_BUDGET = 10
DEFAULT_THREADS = 1

COMMANDS = (
    "blocks-regular",
    "blocks-irregular",
    "vo-solve",
    "degenerate",
    "agt-crosscheck",
    "tau",
    "residual",
)

# Section of the parameter file each command reads.
SECTION_FOR_COMMAND = {
    "blocks-regular": "block",
    "agt-crosscheck": "block",
    "blocks-irregular": "irregular_block",
    "vo-solve": "vo",
    "degenerate": "degeneration",
    "tau": "tau",
    "residual": "tau",
}


@dataclass
class RunConfig:
    command: str
    params_path: Optional[Path] = None
    output: Optional[Path] = None
    digits: int = DEFAULT_DIGITS
    orders: dict[str, int] = field(default_factory=dict)
    seed: int = 0
    threads: int = DEFAULT_THREADS
    csv: Optional[Path] = None
    verbose: bool = False
    overrides: dict[str, Any] = field(default_factory=dict)
    params: dict[str, Any] = field(default_factory=dict)

    def section(self) -> dict[str, Any]:
        """The command's parameter section with command-line overrides applied."""
        name = SECTION_FOR_COMMAND[self.command]
        merged = dict(self.params.get(name, {}))
        merged.update({k: v for k, v in self.overrides.items() if v is not None})
        return merged

    def to_json(self) -> dict[str, Any]:
        data = asdict(self)
        for key in ("params_path", "output", "csv"):
            data[key] = None if data[key] is None else str(data[key])
        data["resolved"] = self.section()
        return data


def load_schema() -> dict[str, Any]:
    return json.loads(SCHEMA_PATH.read_text())


def load_params(path: Path) -> dict[str, Any]:
    """Read and validate a parameter file against the shipped schema."""
    import jsonschema

    from errors import ConfigError

    try:
        data = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise ConfigError(f"parameter file not found: {path}")
    except json.JSONDecodeError as e:
        raise ConfigError(f"invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}")
    validator = jsonschema.Draft202012Validator(load_schema())
    errors = sorted(validator.iter_errors(data), key=lambda e: list(e.absolute_path))
    if errors:
        first = errors[0]
        where = "/".join(str(p) for p in first.absolute_path) or "<root>"
        raise ConfigError(first.message, key=where)
    return data
