# gr2/certificates.py
import hashlib
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

from gr2 import VERSION, config

logger = logging.getLogger("gr2")

RESULTS = ("pass", "fail", "error")


def _jsonable(value):
    if isinstance(value, (set, frozenset)):
        return sorted(value)
    return str(value)


@dataclass
class Certificate:
    command: str
    genus: int
    parameters: dict = field(default_factory=dict)
    result: str = "pass"
    details: dict = field(default_factory=dict)
    seed: int = 0
    artifact_version: str = field(default_factory=config.artifact_version)
    schema_version: int = field(default_factory=config.schema_version)
    timings_ms: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.result not in RESULTS:
            raise ValueError(f"Invalid certificate result: {self.result}")

    def build_model(self, with_timings=True):
        model = {
            "command": self.command,
            "genus": self.genus,
            "parameters": self.parameters,
            "result": self.result,
            "details": self.details,
            "seed": self.seed,
            "artifact_version": self.artifact_version,
            "schema_version": self.schema_version,
            "tool_version": VERSION,
        }
        if with_timings:
            model["timings_ms"] = self.timings_ms
        return model

    def to_dict(self):
        return json.loads(self.to_json())

    def to_json(self, with_timings=True):
        return json.dumps(self.build_model(with_timings), sort_keys=True, indent=2, default=_jsonable)

    def digest(self):
        """SHA-256 of the certificate without its timings."""
        return hashlib.sha256(self.to_json(with_timings=False).encode()).hexdigest()

    def render_text(self):
        lines = [f"{self.command} (genus {self.genus}): {self.result.upper()}"]
        for key, value in sorted(self.parameters.items()):
            lines.append(f"  {key}: {value}")
        for key, value in sorted(self.details.items()):
            if isinstance(value, dict):
                lines.append(f"  {key}:")
                for inner, item in sorted(value.items(), key=lambda kv: str(kv[0])):
                    lines.append(f"    {inner}: {item}")
            else:
                lines.append(f"  {key}: {value}")
        return "\n".join(lines)

    def write(self, path):
        path = Path(path)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(self.to_json() + "\n")
            logger.info(f"Certificate written to {path}")
        except OSError as e:
            logger.error(f"Failed to write certificate to {path}: {e}")
            raise
        return path
