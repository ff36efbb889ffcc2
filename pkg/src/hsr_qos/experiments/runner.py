import logging
import os
from dataclasses import dataclass
from typing import Any, Iterable, Optional, Sequence

import numpy as np
import pandas as pd
from pandas import DataFrame

from hsr_qos import constants
from hsr_qos.allocators import (
    AllocationResult,
    Method,
    Strategy,
    allocate_min_power,
    crossing_energy,
    min_power_table,
)
from hsr_qos.channel import dbm_to_mw, mw_to_dbm
from hsr_qos.experiments.manifest import build_manifest, write_manifest
from hsr_qos.nonuniform import dominance_check, power_margin_curve, worst_case_region
from hsr_qos.region import (
    SEPARATE,
    SIMULTANEOUS,
    baseline_region,
    separate_schedule_region,
    simultaneous_region_two_channels,
    sweep_region,
    throughput_gain,
)
from hsr_qos.scenario import RatePair, Scenario, resolve_scenario

logger: logging.Logger = logging.getLogger(__name__)


@dataclass
class CsvArtifact:
    name: str
    columns: list[str]
    rows: list[list[Any]]

    @classmethod
    def from_dataframe(cls, name: str, df: DataFrame) -> "CsvArtifact":
        return cls(name=name, columns=list(df.columns), rows=df.values.tolist())

    @property
    def dataframe(self) -> DataFrame:
        return pd.DataFrame(self.rows, columns=self.columns)


@dataclass(frozen=True)
class MinPowerOutcome:
    result: AllocationResult
    demand: RatePair
    energy_j: float
    profile_path: Optional[str] = None

    @property
    def power_mw(self) -> float:
        return self.result.avg_power

    @property
    def power_dbm(self) -> float:
        return mw_to_dbm(self.result.avg_power)


class ExperimentRunner:
    """Computes the tables and figure data and writes them as CSV artifacts.

    Every CSV gets a `<name>.manifest.json` sidecar with the command, the
    scenario hash and the effective parameters.
    """

    def __init__(
        self,
        scenario: Optional[Scenario] = None,
        output_folder: Optional[str] = None,
    ) -> None:
        self.scenario: Scenario = scenario if scenario else resolve_scenario()
        self.output_folder: str = output_folder or os.getenv(
            constants.OUTPUT_ENV, constants.OUTPUT_FOLDER
        )
        logger.info("Artifacts go to %s", self.output_folder)

    def write(
        self, artifact: CsvArtifact, command: str, parameters: dict[str, Any]
    ) -> str:
        """Write `artifact` and its manifest sidecar.

        Returns:
            str: path of the CSV file.
        """
        os.makedirs(self.output_folder, exist_ok=True)
        path = os.path.join(self.output_folder, f"{artifact.name}.csv")
        artifact.dataframe.to_csv(
            path,
            index=False,
            float_format=constants.FLOAT_FORMAT,
            lineterminator=constants.LINE_TERMINATOR,
        )
        write_manifest(build_manifest(command, self.scenario, parameters), path)
        logger.info("Wrote %s", path)
        return path

    def region(
        self,
        p0_dbm: float = 30.0,
        points: int = constants.DEFAULT_REGION_POINTS,
        strategies: Sequence[Strategy] = tuple(Strategy),
        name: str = "region",
    ) -> str:
        """Boundaries of the requested strategies at one budget."""
        P0 = dbm_to_mw(p0_dbm)
        frames = []
        for strategy in strategies:
            if strategy == Strategy.HAA:
                boundary = sweep_region(self.scenario, P0, points)
            else:
                boundary = baseline_region(self.scenario, P0, strategy, points)
            frames.append(boundary.dataframe())
        artifact = CsvArtifact.from_dataframe(name, pd.concat(frames))
        parameters = {
            "p0_dbm": p0_dbm,
            "points": points,
            "strategies": [s.value for s in strategies],
        }
        return self.write(artifact, "region", parameters)

    def table1(
        self, demands: Optional[Iterable[RatePair]] = None, name: str = "table1"
    ) -> str:
        rows = list(demands) if demands is not None else table1_demands()
        df = min_power_table(self.scenario, rows)
        parameters = {"demands_mbps": [list(d.as_mbps()) for d in rows]}
        return self.write(CsvArtifact.from_dataframe(name, df), "table1", parameters)

    def minpower(
        self,
        demand: RatePair,
        strategy: Strategy = Strategy.HAA,
        method: Method = "bisection",
        profile_name: Optional[str] = None,
        max_iterations: int = constants.ALGORITHM1_MAX_ITERATIONS,
    ) -> MinPowerOutcome:
        """Minimum average power of `strategy`, optionally writing the profile."""
        result = allocate_min_power(
            self.scenario, demand, strategy, method, max_iterations
        )
        profile_path = None
        if profile_name:
            parameters = {
                "r_di_mbps": demand.as_mbps()[0],
                "r_ds_mbps": demand.as_mbps()[1],
                "strategy": strategy.value,
                "method": method,
                "max_iterations": max_iterations,
            }
            artifact = CsvArtifact.from_dataframe(
                profile_name, result.profile.dataframe
            )
            profile_path = self.write(artifact, "minpower", parameters)
        return MinPowerOutcome(
            result=result,
            demand=demand,
            energy_j=crossing_energy(self.scenario, result.avg_power),
            profile_path=profile_path,
        )

    def two_channel(
        self,
        p0_dbm: float = 40.0,
        points: int = constants.DEFAULT_REGION_POINTS,
        n_split: int = constants.DEFAULT_SEPARATE_SPLITS,
        name: str = "two_channel",
    ) -> tuple[str, float]:
        """Simultaneous and separate frontiers plus the gain at r_ds = 0."""
        P0 = dbm_to_mw(p0_dbm)
        simultaneous = simultaneous_region_two_channels(self.scenario, P0, points)
        separate = separate_schedule_region(self.scenario, P0, n_split)
        df = pd.concat(
            [
                simultaneous.dataframe("schedule"),
                separate.dataframe("schedule"),
            ]
        )
        gain = throughput_gain(simultaneous, separate)
        parameters = {
            "p0_dbm": p0_dbm,
            "points": points,
            "n_split": n_split,
            "schedules": [SIMULTANEOUS, SEPARATE],
            "gain_at_zero_rds": gain,
        }
        artifact = CsvArtifact.from_dataframe(name, df)
        path = self.write(artifact, "two-channel", parameters)
        return path, gain

    def nonuniform(
        self,
        p0_dbm: float = 40.0,
        ratios: Sequence[float] = constants.WORST_CASE_RATIOS,
        points: int = constants.DEFAULT_REGION_POINTS,
        name: str = "nonuniform",
    ) -> str:
        """Worst-case boundaries, one per speed deviation ratio."""
        P0 = dbm_to_mw(p0_dbm)
        frames = []
        for ratio in ratios:
            boundary = worst_case_region(
                self.scenario, ratio * self.scenario.v0, P0, points
            )
            df = boundary.dataframe()
            frames.append(df.drop(columns="strategy").assign(ratio=ratio))
        df = pd.concat(frames)[["ratio", "r_ds_bps", "r_di_bps"]]
        parameters = {"p0_dbm": p0_dbm, "ratios": list(ratios), "points": points}
        artifact = CsvArtifact.from_dataframe(name, df)
        return self.write(artifact, "nonuniform", parameters)

    def margin(
        self,
        demand: RatePair,
        ratios: Sequence[float] = constants.MARGIN_RATIOS,
        name: str = "margin",
    ) -> str:
        """Normalized worst-case minimum power, linear and in dB."""
        curve = power_margin_curve(self.scenario, demand, ratios)
        df = pd.DataFrame(curve, columns=["ratio", "normalized_power"])
        df["db"] = 10.0 * np.log10(df["normalized_power"])
        parameters = {
            "r_di_mbps": demand.as_mbps()[0],
            "r_ds_mbps": demand.as_mbps()[1],
            "ratios": list(ratios),
        }
        return self.write(CsvArtifact.from_dataframe(name, df), "margin", parameters)

    def dominance(
        self,
        demand: RatePair,
        ratio: float = 0.05,
        seed: int = 0,
        samples: int = 100,
        name: str = "dominance",
    ) -> tuple[str, bool]:
        """Monte-Carlo check that no sampled realization beats the worst case."""
        seeds = range(seed, seed + samples)
        report = dominance_check(self.scenario, ratio * self.scenario.v0, demand, seeds)
        parameters = {
            "r_di_mbps": demand.as_mbps()[0],
            "r_ds_mbps": demand.as_mbps()[1],
            "ratio": ratio,
            "seed": seed,
            "samples": samples,
        }
        artifact = CsvArtifact.from_dataframe(name, report.dataframe)
        return self.write(artifact, "dominance", parameters), report.holds()


def table1_demands() -> list[RatePair]:
    return [
        RatePair.from_mbps(r_di, r_ds)
        for r_di, r_ds in constants.REFERENCE_DEMANDS_MBPS
    ]
