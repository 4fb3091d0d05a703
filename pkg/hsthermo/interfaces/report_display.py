"""
Result formatting for the hsthermo command line
"""

import cmath
from typing import Optional, Sequence, Tuple

from rich.console import Console
from rich.panel import Panel
from rich.table import Table

from hsthermo.core.models import QubitThermalModel
from hsthermo.core.scheme import GammaValue
from hsthermo.core.types import CheckReport, SweepResult

MAX_DISPLAY_ROWS = 60


class ReportFormatter:
    """Formats sweep tables, check reports and Gamma values for Rich console display"""

    def __init__(self, console: Optional[Console] = None):
        self.console = console or Console()

    def format_sweep(self, result: SweepResult):
        """
        Display a sweep as a table

        Args:
            result: SweepResult to show; long tables are truncated
        """
        table = Table(title=f"QFI sweep ({result.metadata.get('mode', '')})", show_header=True)
        for column in result.columns:
            table.add_column(column, justify="right")
        for row in result.rows[:MAX_DISPLAY_ROWS]:
            values = row.to_dict()
            table.add_row(*[self._format_value(values.get(column)) for column in result.columns])
        self.console.print(table)
        hidden = len(result.rows) - MAX_DISPLAY_ROWS
        if hidden > 0:
            self.console.print(f"[dim]… {hidden} more rows; use --output to write the full table[/dim]")

    def format_report(self, report: CheckReport):
        """
        Display a check report with both sides of each inequality

        Args:
            report: CheckReport to show
        """
        table = Table(title=report.title, show_header=True)
        table.add_column("Check")
        table.add_column("lhs", justify="right")
        table.add_column("rhs", justify="right")
        table.add_column("Result")
        table.add_column("Detail", style="dim")
        for row in report.rows:
            verdict = "[green]pass[/green]" if row.passed else "[red]FAIL[/red]"
            table.add_row(row.name, f"{row.lhs:.6e}", f"{row.rhs:.6e}", verdict, row.detail)
        self.console.print(table)
        if report.passed:
            self.format_success("All checks passed")
        else:
            failed = sum(1 for row in report.rows if not row.passed)
            self.format_error(f"{failed} check(s) failed")

    def format_gamma(self, model: QubitThermalModel, gamma: GammaValue, phase: float):
        lines = [
            f"Gamma         = {gamma.value.real:.12f} {gamma.value.imag:+.12f}i",
            f"|Gamma|       = {gamma.modulus:.12f}",
            f"arg Gamma     = {cmath.phase(gamma.value):.12f}",
            f"dGamma/dtheta = {gamma.dvalue_dtheta.real:.12f} {gamma.dvalue_dtheta.imag:+.12f}i",
            f"ideal limit   = exp(-2i*{phase:.9f})",
        ]
        self.console.print(Panel(
            "\n".join(lines),
            title=f"theta={model.theta:g}, xi={model.xi:g}",
            border_style="blue",
        ))

    def format_nmax(self, rows: Sequence[Tuple[float, float, float, int]], rule: str):
        table = Table(title=f"N_max ({rule})", show_header=True)
        for column in ("xi", "eta", "theta", "N_max"):
            table.add_column(column, justify="right")
        for xi, eta, theta, nmax in rows:
            table.add_row(f"{xi:g}", f"{eta:g}", f"{theta:g}", str(nmax))
        self.console.print(table)

    def format_error(self, error_text: str):
        self.console.print(f"[red]✗ {error_text}[/red]")

    def format_success(self, success_text: str):
        self.console.print(f"[green]✓ {success_text}[/green]")

    @staticmethod
    def _format_value(value) -> str:
        if value is None:
            return ""
        if isinstance(value, float):
            return f"{value:.6e}"
        return str(value)
