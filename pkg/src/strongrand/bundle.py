"""Output bundle and its file formats.

Open formats (text, csv, json) carry everything: audit block, assignment
list, groups and phase schedule. The sealed layout splits the same content
so that no single file reveals more than one registration slot or one phase:

    <dir>/audit                 seed and trial parameters (statistician only)
    <dir>/envelopes/001 ...     one per registration slot: patient, phase-1 treatment
    <dir>/phases/phase-2 ...    one per later phase: group -> treatment
"""

from __future__ import annotations

import csv
import io
import json
import os
from dataclasses import asdict, dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import List, Optional

from strongrand import __version__
from strongrand.grouping import group_of_position, partition_groups
from strongrand.phases import PhaseMatrix, full_schedule, treatment_of
from strongrand.threshold import TrialConfig, generate_assignment_list

FORMATS = ("text", "csv", "json")


def treatment_label(index: int) -> str:
    """1 -> A, 26 -> Z, 27 -> AA (spreadsheet-style)."""
    if index < 1:
        raise ValueError("treatment index is 1-based")
    label = ""
    while index:
        index, rem = divmod(index - 1, 26)
        label = chr(ord("A") + rem) + label
    return label


def now_timestamp() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


@dataclass
class Audit:
    patients: int
    groups: int
    seed_used: Optional[int]
    timestamp: str
    tool_version: str = __version__
    source: str = "seeded"
    design: str = "crossover"


@dataclass
class OutputBundle:
    audit: Audit
    assignment: List[int]
    groups: List[List[int]]
    matrix: Optional[PhaseMatrix] = None
    sealed: bool = False

    @property
    def crossover(self) -> bool:
        return self.matrix is not None

    def phase_one_treatment(self, group: int) -> int:
        if self.matrix is None:
            return group
        return treatment_of(self.matrix, 1, group)

    def to_dict(self) -> dict:
        return {
            "audit": asdict(self.audit),
            "assignment": list(self.assignment),
            "groups": [list(g) for g in self.groups],
            "phase_matrix": self.matrix.to_lists() if self.matrix is not None else None,
            "sealed": self.sealed,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "OutputBundle":
        rows = data.get("phase_matrix")
        matrix = PhaseMatrix(tuple(tuple(r) for r in rows)) if rows is not None else None
        return cls(
            audit=Audit(**data["audit"]),
            assignment=list(data["assignment"]),
            groups=[list(g) for g in data["groups"]],
            matrix=matrix,
            sealed=bool(data.get("sealed", False)),
        )


def generate_bundle(config: TrialConfig, source, design: str = "crossover",
                    timestamp: Optional[str] = None) -> OutputBundle:
    """Run the generator and package the result with its audit block.

    "crossover" draws N + g uniforms (patient list, then the phase-1 row);
    "parallel" draws N and gives group m treatment m throughout.
    """
    if design == "crossover":
        assignment, groups, matrix = full_schedule(config, source)
    elif design == "parallel":
        assignment = generate_assignment_list(config, source)
        groups, matrix = partition_groups(assignment, config.groups), None
    else:
        raise ValueError(f"unknown design {design!r}")
    seed = getattr(source, "seed_used", None)
    audit = Audit(
        patients=config.patients,
        groups=config.groups,
        seed_used=seed,
        timestamp=timestamp or now_timestamp(),
        source="replay" if seed is None else "seeded",
        design=design,
    )
    return OutputBundle(audit, assignment, groups, matrix)


def _audit_lines(bundle: OutputBundle) -> List[str]:
    a = bundle.audit
    seed = "none (replay)" if a.seed_used is None else str(a.seed_used)
    return [
        f"strongrand {a.tool_version}",
        f"timestamp: {a.timestamp}",
        f"seed_used: {seed}",
        f"patients: {a.patients}",
        f"groups: {a.groups}",
        f"design: {a.design}",
    ]


def format_text(bundle: OutputBundle) -> str:
    lines = ["# " + line for line in _audit_lines(bundle)]
    lines.append("")
    lines.append("Assignment list: " + " ".join(map(str, bundle.assignment)))
    for m, members in enumerate(bundle.groups, start=1):
        head = f"Group {m}" if bundle.crossover else f"Group {m} (Treatment {treatment_label(m)})"
        lines.append(f"{head}: " + " ".join(map(str, members)))
    if bundle.crossover:
        for i, row in enumerate(bundle.matrix.rows, start=1):
            cells = ", ".join(f"{treatment_label(j)} <- group {m}" for j, m in enumerate(row, start=1))
            lines.append(f"Phase {i}: {cells}")
    return "\n".join(lines) + "\n"


def format_csv(bundle: OutputBundle) -> str:
    buf = io.StringIO()
    for line in _audit_lines(bundle):
        buf.write(f"# {line}\n")
    writer = csv.writer(buf, lineterminator="\n")
    n, g = bundle.audit.patients, bundle.audit.groups
    if bundle.crossover:
        writer.writerow(["position", "patient", "group"] + [f"phase_{i}" for i in range(1, g + 1)])
    else:
        writer.writerow(["position", "patient", "group", "treatment"])
    for pos, patient in enumerate(bundle.assignment, start=1):
        m = group_of_position(pos, n, g)
        if bundle.crossover:
            treatments = [treatment_label(treatment_of(bundle.matrix, i, m)) for i in range(1, g + 1)]
        else:
            treatments = [treatment_label(m)]
        writer.writerow([pos, patient, m] + treatments)
    return buf.getvalue()


def format_json(bundle: OutputBundle) -> str:
    return json.dumps(bundle.to_dict(), indent=2) + "\n"


def parse_json(text: str) -> OutputBundle:
    return OutputBundle.from_dict(json.loads(text))


def render(bundle: OutputBundle, fmt: str) -> str:
    if fmt == "text":
        return format_text(bundle)
    if fmt == "csv":
        return format_csv(bundle)
    if fmt == "json":
        return format_json(bundle)
    raise ValueError(f"unknown format {fmt!r}; choose from {', '.join(FORMATS)}")


def emit_open(bundle: OutputBundle, fmt: str = "text", out: Optional[os.PathLike] = None) -> str:
    """Render `bundle`; write it to `out` when given. Returns the rendered text."""
    text = render(bundle, fmt)
    if out is not None:
        path = Path(out)
        try:
            path.write_text(text)
        except OSError as exc:
            raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc
    return text


def envelope_width(patients: int) -> int:
    return max(3, len(str(patients)))


def emit_sealed(bundle: OutputBundle, directory: os.PathLike) -> List[Path]:
    """Write the sealed layout under `directory`; returns the files written."""
    root = Path(directory)
    if root.exists() and (not root.is_dir() or any(root.iterdir())):
        raise FileExistsError(f"refusing to write sealed envelopes into non-empty {root}")
    a = bundle.audit
    n, g = a.patients, a.groups
    (root / "envelopes").mkdir(parents=True, exist_ok=True)
    written = []

    audit = root / "audit"
    audit.write_text("\n".join(_audit_lines(bundle)) + "\n")
    written.append(audit)

    width = envelope_width(n)
    for pos, patient in enumerate(bundle.assignment, start=1):
        j = bundle.phase_one_treatment(group_of_position(pos, n, g))
        name = f"{pos:0{width}d}"
        path = root / "envelopes" / name
        path.write_text(f"envelope: {name}\npatient: {patient}\ntreatment: {treatment_label(j)}\n")
        written.append(path)

    if bundle.crossover and g > 1:
        (root / "phases").mkdir()
        for i in range(2, g + 1):
            path = root / "phases" / f"phase-{i}"
            body = [f"phase: {i}"]
            body += [f"group {m}: treatment {treatment_label(treatment_of(bundle.matrix, i, m))}"
                     for m in range(1, g + 1)]
            path.write_text("\n".join(body) + "\n")
            written.append(path)
    return written


def read_keyed(path: os.PathLike) -> dict:
    """Parse a sealed-layout file of ``key: value`` lines."""
    out = {}
    for line in Path(path).read_text().splitlines():
        key, _, value = line.partition(":")
        out[key.strip()] = value.strip()
    return out
