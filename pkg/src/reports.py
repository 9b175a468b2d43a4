import json
from pathlib import Path
from typing import Any, Optional

import polars as pl
from rich.console import Console
from rich.panel import Panel
from rich.table import Table

from config import VERSION, RunConfig


def series_table(series: dict[str, Any]) -> pl.DataFrame:
    """One row per order, one column per named coefficient list."""
    rows = max((len(v) for v in series.values() if v is not None), default=0)
    data: dict[str, list] = {"order": list(range(rows))}
    for name, coeffs in series.items():
        if coeffs is None:
            continue
        data[name] = [_cell(c) for c in coeffs]
    return pl.DataFrame(data)


def _cell(value: Any) -> str:
    if isinstance(value, dict):
        if "rat" in value:
            return value["rat"]
        if "cplx" in value:
            re, im = value["cplx"]
            return f"{re}{'' if im.startswith('-') else '+'}{im}i"
        return json.dumps(value, sort_keys=True, ensure_ascii=False)
    return str(value)


class ReportWriter:
    def __init__(self, console: Console):
        self.console = console

    def build(self, cfg: RunConfig, result: dict[str, Any]) -> dict[str, Any]:
        return {"version": VERSION, "command": cfg.command, "config": cfg.to_json(), "result": result}

    def dumps(self, report: dict[str, Any]) -> str:
        return json.dumps(report, indent=2, sort_keys=True, ensure_ascii=False) + "\n"

    def write(self, cfg: RunConfig, result: dict[str, Any], table: Optional[pl.DataFrame] = None) -> dict[str, Any]:
        """Write the JSON report (file or stdout) and the optional CSV table."""
        report = self.build(cfg, result)
        text = self.dumps(report)
        if cfg.output is None:
            self.console.print_json(text)
        else:
            Path(cfg.output).parent.mkdir(parents=True, exist_ok=True)
            Path(cfg.output).write_text(text, encoding="utf-8")
            self.console.print(f"  Report written to [green]{cfg.output}[/green]")
        if cfg.csv is not None and table is not None:
            Path(cfg.csv).parent.mkdir(parents=True, exist_ok=True)
            table.write_csv(cfg.csv)
            self.console.print(f"  Table written to [green]{cfg.csv}[/green] ({table.height} rows)")
        return report

    def verdicts(self, title: str, rows: list[tuple[Any, str]]) -> None:
        table = Table(title=title)
        table.add_column("order", justify="right")
        table.add_column("verdict")
        for k, verdict in rows:
            style = "green" if verdict == "match" else "red"
            table.add_row(str(k), f"[{style}]{verdict}[/{style}]")
        self.console.print(table)

    def done(self, message: str, title: str = "Done") -> None:
        self.console.print(Panel(f"[bold green]{message}[/bold green]", title=title, style="green"))
