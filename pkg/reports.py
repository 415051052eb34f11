"""
Report records: per-condition results, verdicts and the calibration record.

Field names are stable; `passed` is serialized as `pass`.
"""
from pathlib import Path
from typing import List, Literal

from pydantic import BaseModel, ConfigDict, Field

from errors import CalibrationError

SchubertIndex = Literal["direct", "w0-shifted"]
FINITE_SURROGATE = "finite surrogate"


class Condition(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    condition: str = Field(..., description="What was evaluated")
    value: str = Field(..., description="Exact rational or residue")
    modulus: str = Field(..., description="'Z' for integrality, or the modulus")
    passed: bool = Field(..., alias="pass")
    source: str = Field(..., description="Family of the condition")
    evaluated: bool = Field(True, description="False when the condition could not be evaluated")


class Verdict(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    passed: bool = Field(..., alias="pass")
    criterion: str = Field(FINITE_SURROGATE, description="Criterion family")
    conditions: List[Condition] = Field(default_factory=list)
    notes: List[str] = Field(default_factory=list)

    @classmethod
    def from_conditions(cls, conditions: List[Condition], notes: List[str] = ()) -> "Verdict":
        return cls(passed=all(c.passed for c in conditions), conditions=list(conditions), notes=list(notes))

    def failures(self) -> List[Condition]:
        return [c for c in self.conditions if not c.passed]

    def to_json(self) -> str:
        return self.model_dump_json(by_alias=True, indent=2)

    def render(self) -> str:
        lines = [f"verdict: {'PASS' if self.passed else 'FAIL'} ({self.criterion}, {len(self.conditions)} conditions)"]
        for c in self.conditions:
            mark = "ok  " if c.passed else "FAIL"
            if not c.evaluated:
                mark = "skip"
            where = "in Z" if c.modulus == "Z" else f"mod {c.modulus}"
            lines.append(f"  [{mark}] {c.condition}: {c.value} {where}  ({c.source})")
        lines.extend(f"  note: {n}" for n in self.notes)
        return "\n".join(lines)


class Convention(BaseModel):
    """Twist sign s in e^{s rho} and the Schubert index convention used by the flag route."""

    twist_sign: int = Field(1, description="+1 or -1")
    schubert_index: SchubertIndex = Field("direct")


class OracleOutcome(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    cartan_type: str
    twist_sign: int
    schubert_index: SchubertIndex
    oracle: str
    passed: bool = Field(..., alias="pass")
    detail: str = ""


class CalibrationReport(BaseModel):
    twist_sign: int
    schubert_index: SchubertIndex
    types: List[str]
    outcomes: List[OracleOutcome] = Field(default_factory=list)

    def convention(self) -> Convention:
        return Convention(twist_sign=self.twist_sign, schubert_index=self.schubert_index)

    def to_json(self) -> str:
        return self.model_dump_json(by_alias=True, indent=2)

    def save(self, path: Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.to_json() + "\n", encoding="utf-8")
        return path

    @classmethod
    def load(cls, path: Path) -> "CalibrationReport":
        path = Path(path)
        if not path.exists():
            raise CalibrationError(f"no calibration record at {path}; run `calibrate <type>` first")
        return cls.model_validate_json(path.read_text(encoding="utf-8"))
