from hsr_qos.experiments.manifest import RunManifest
from hsr_qos.experiments.runner import CsvArtifact, ExperimentRunner, MinPowerOutcome

__all__ = ["CsvArtifact", "ExperimentRunner", "MinPowerOutcome", "RunManifest"]
