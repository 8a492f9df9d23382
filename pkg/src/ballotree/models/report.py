from datetime import datetime, timezone
from enum import Enum
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field

REPORT_SCHEMA = "ballotree.report/1"


class SweepMode(str, Enum):
    EXHAUSTIVE = "exhaustive"
    SAMPLED = "sampled"


class Witness(BaseModel):
    """Replayable counterexample or extremal case."""
    tournament: Optional[str] = None  # "n=<k>\n<bits>\n" text
    pm_spec: Optional[str] = None  # perfect manipulator spec text
    bindings: Dict[str, int] = Field(default_factory=dict)
    case_index: Optional[int] = None
    winner: Optional[int] = None
    detail: Optional[str] = None


class VerificationReport(BaseModel):
    schema_: str = Field(default=REPORT_SCHEMA, alias="schema")
    check: str
    params: Dict[str, Any] = Field(default_factory=dict)
    mode: SweepMode
    samples: Optional[int] = None
    seed: Optional[int] = None
    generator: Optional[str] = None
    cases_run: int = 0
    expected_cases: Optional[int] = None
    passed: bool
    observed: Dict[str, Any] = Field(default_factory=dict)
    witness: Optional[Witness] = None
    sub_reports: List["VerificationReport"] = Field(default_factory=list)
    argv: List[str] = Field(default_factory=list)
    wall_time: float = 0.0
    finished_at: str = Field(default_factory=lambda: datetime.now(timezone.utc).isoformat())

    model_config = {"populate_by_name": True}

    def to_json(self) -> str:
        return self.model_dump_json(by_alias=True, indent=2)

    def comparable(self) -> Dict[str, Any]:
        """Dump without timing fields, for run-to-run comparison."""
        return self.model_dump(by_alias=True, exclude={"wall_time", "finished_at", "sub_reports"}) | {
            "sub_reports": [r.comparable() for r in self.sub_reports]
        }


VerificationReport.model_rebuild()


class TreeStatsReport(BaseModel):
    leaf_count: str  # decimal; can exceed 64 bits
    depth: int
    dag_nodes: int
