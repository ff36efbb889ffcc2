from enum import StrEnum


class Tag(StrEnum):
    SCENARIO = "Scenario"
    POWER = "Minimum Power"
    REGION = "Rate Region"
