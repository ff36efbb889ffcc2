import hashlib
import os
from datetime import datetime, timezone
from typing import Any

from pydantic import BaseModel, Field

from hsr_qos import __version__, constants
from hsr_qos.scenario import Scenario, scenario_digest


class RunManifest(BaseModel):
    """Sidecar describing how a CSV artifact was produced."""

    command: str = Field(..., description="Command that produced the artifact")
    scenario_hash: str = Field(..., description="sha256 of the canonical scenario")
    scenario: dict[str, Any] = Field(..., description="Effective scenario")
    parameters: dict[str, Any] = Field(..., description="Effective parameters")
    tool_version: str = Field(..., description="hsr_qos version")
    timestamp: str = Field(..., description="UTC time, ISO 8601")


def scenario_hash(scenario: Scenario) -> str:
    return hashlib.sha256(scenario_digest(scenario).encode("utf-8")).hexdigest()


def build_manifest(
    command: str, scenario: Scenario, parameters: dict[str, Any]
) -> RunManifest:
    return RunManifest(
        command=command,
        scenario_hash=scenario_hash(scenario),
        scenario=scenario.model_dump(by_alias=True),
        parameters=parameters,
        tool_version=__version__,
        timestamp=datetime.now(timezone.utc).isoformat(),
    )


def manifest_path(csv_path: str) -> str:
    """`<folder>/<name>.manifest.json` next to `<folder>/<name>.csv`."""
    root, _ = os.path.splitext(csv_path)
    return root + constants.MANIFEST_SUFFIX


def write_manifest(manifest: RunManifest, csv_path: str) -> str:
    path = manifest_path(csv_path)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(manifest.model_dump_json(indent=2))
        f.write("\n")
    return path
