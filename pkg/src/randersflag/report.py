import json
import sys
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

from randersflag.ui import colorize_verdict, gradient_text, print_report_box

FORMATS = ("table", "json")


def plain(value):
    """numpy scalars and arrays to JSON-ready Python values"""
    if isinstance(value, dict):
        return {str(k): plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [plain(v) for v in value]
    if isinstance(value, np.ndarray):
        return plain(value.tolist())
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (np.floating, float)):
        return float(value)
    return value


@dataclass
class Section:
    title: str
    data: Dict[str, Any]
    tolerance: Optional[float]
    verdict: Optional[bool] = None
    lines: List[str] = field(default_factory=list)
    table_hidden: tuple = ()


@dataclass
class RunReport:
    command: str
    problem: str
    digest: str
    tool_version: str
    tolerances: Dict[str, float]
    sections: List[Section] = field(default_factory=list)
    discrepancies: List[Dict[str, Any]] = field(default_factory=list)

    def add(self, title: str, data: Dict[str, Any], tolerance: Optional[float] = None,
            verdict: Optional[bool] = None, lines: Optional[List[str]] = None,
            table_hidden: tuple = ()) -> None:
        self.sections.append(Section(title, plain(data), tolerance, verdict, list(lines or []), tuple(table_hidden)))

    def discrepancy(self, name: str, value: float, tolerance: float, note: str = "") -> None:
        self.discrepancies.append({
            'name': name,
            'value': float(value),
            'tolerance': tolerance,
            'exceeds': bool(value > tolerance),
            'note': note,
        })

    def records(self) -> List[Dict[str, Any]]:
        out = [{
            'record': 'run',
            'command': self.command,
            'problem': self.problem,
            'digest': self.digest,
            'tool_version': self.tool_version,
            'tolerances': self.tolerances,
        }]
        for section in self.sections:
            record = {'record': 'result', 'section': section.title, 'tolerance': section.tolerance}
            if section.verdict is not None:
                record['verdict'] = section.verdict
            record.update(section.data)
            out.append(record)
        for item in self.discrepancies:
            out.append({'record': 'discrepancy', **item})
        return out

    def emit(self, fmt: str = "table", stream=None) -> None:
        stream = sys.stdout if stream is None else stream
        if fmt == "json":
            for record in self.records():
                print(json.dumps(plain(record), sort_keys=True), file=stream)
            return

        print_report_box("randersflag", {
            'command': self.command,
            'problem': self.problem,
            'digest': self.digest[:16],
            'version': self.tool_version,
        }, output_stream=stream)

        for section in self.sections:
            title = section.title
            if section.verdict is not None:
                title = f"{title} {colorize_verdict(section.verdict)}"
            data = {k: v for k, v in section.data.items() if k not in section.table_hidden}
            if section.tolerance is not None:
                data['tolerance'] = section.tolerance
            print_report_box(title, data, output_stream=stream)
            for line in section.lines:
                print(line, file=stream)

        if self.discrepancies:
            print(gradient_text("\n Discrepancies ", stream=stream), file=stream)
            for item in self.discrepancies:
                flag = colorize_verdict(not item['exceeds'])
                note = f"  ({item['note']})" if item['note'] else ""
                print(f"  {flag} {item['name']}: {item['value']:.12g} (tolerance {item['tolerance']:g}){note}", file=stream)
