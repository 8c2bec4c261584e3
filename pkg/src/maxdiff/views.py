"""Define the representations of the data."""

import json
from typing import TYPE_CHECKING, Any, Dict, List, Literal, Sequence, Set

import pandas as pd
import tabulate

if TYPE_CHECKING:
    from maxdiff.model import TestReport
    from maxdiff.simulation import ExperimentTable
    from maxdiff.tuning import TauScan

OutputFormat = Literal["table", "json", "csv"]

# Per observation vectors only fit in the json output.
VECTOR_FIELDS = ("nu_hat", "omega_hat")


def _flat_report(report: "TestReport") -> Dict[str, Any]:
    """Flatten a report into a row of scalars."""
    row = report.dict(exclude=set(VECTOR_FIELDS))
    row["group_sizes"] = " ".join(str(size) for size in report.group_sizes)
    row["warnings"] = "; ".join(report.warnings)
    if report.nu_hat is not None:
        row["max_nu_hat"] = max(report.nu_hat)
    if report.omega_hat is not None:
        row["max_omega_hat_sq"] = max(value**2 for value in report.omega_hat)
    return row


def _render(rows: List[Dict[str, Any]], output: OutputFormat) -> str:
    """Render rows of scalars in the desired format."""
    if output == "json":
        return json.dumps(rows, indent=2)
    if output == "csv":
        return str(pd.DataFrame(rows).to_csv(index=False)).rstrip("\n")
    return str(tabulate.tabulate(rows, headers="keys", tablefmt="simple"))


def print_reports(reports: Sequence["TestReport"], output: OutputFormat) -> None:
    """Print the test reports.

    The json output is always an array of complete reports.
    """
    if output == "json":
        print(json.dumps([report.dict() for report in reports], indent=2))
        return
    if output == "csv":
        print(_render([_flat_report(report) for report in reports], output))
        return
    for report in reports:
        rows = [
            {"field": key, "value": value}
            for key, value in _flat_report(report).items()
        ]
        print(f"# {report.method.upper()}")
        print(tabulate.tabulate(rows, headers="keys", tablefmt="simple"))
        print()


def print_experiment(
    table: "ExperimentTable", output: OutputFormat, timings: bool = False
) -> None:
    """Print the rejection rates of an experiment.

    The wall times are hidden unless timings is set so the output is reproducible.
    """
    exclude: Set[str] = set() if timings else {"wall_time"}
    rows = [row.dict(exclude=exclude) for row in table.rows]
    if not rows and output != "json":
        return
    print(_render(rows, output))


def print_scan(scan: "TauScan", output: OutputFormat) -> None:
    """Print the tuning objective of every candidate quantile."""
    rows = [
        {
            "quantile": float(quantile),
            "tau": float(tau),
            "objective": float(objective) if objective > float("-inf") else None,
            "selected": bool(quantile == scan.selected),
        }
        for quantile, tau, objective in zip(scan.grid, scan.taus, scan.objective)
    ]
    print(_render(rows, output))
