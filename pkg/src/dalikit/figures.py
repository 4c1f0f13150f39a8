"""Byte-layout figures written next to the tab-separated reports."""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .chimera import ChimeraReport  # noqa: E402
from .detector import DetectionReport, Severity  # noqa: E402

REGION_COLORS = {
    "TIFF header": "#4c72b0",
    "PDF": "#dd8452",
    "TIFF remainder": "#55a868",
    "PDF trailer copy": "#c44e52",
}
SEVERITY_COLORS = {Severity.INFO: "#8c8c8c", Severity.SUSPICIOUS: "#ccb974",
                   Severity.MALICIOUS: "#c44e52"}


def _finish(fig, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=120, bbox_inches="tight", metadata={"Software": None})
    plt.close(fig)
    return path


def plot_chimera_layout(report: ChimeraReport, path: Path, title: str = "") -> Path:
    """One bar per region of the built file, with the rebased first-IFD pointer marked."""
    regions = [
        ("TIFF header", (0, report.pdf_span[0])),
        ("PDF", report.pdf_span),
        ("TIFF remainder", report.tiff_span),
        ("PDF trailer copy", report.trailer_copy_span),
    ]
    total = report.trailer_copy_span[1]
    fig, ax = plt.subplots(figsize=(9, 2.4))
    for label, (start, end) in regions:
        ax.broken_barh([(start, max(end - start, total * 0.002))], (0.3, 0.4),
                       facecolors=REGION_COLORS[label], label=f"{label} [0x{start:X}, 0x{end:X})")
    first = next((rw for rw in report.rewrites if rw.description == "first IFD offset"), None)
    if first is not None:
        ax.annotate(f"first IFD 0x{first.old:X} -> 0x{first.new:X}",
                    xy=(first.new, 0.7), xytext=(first.new, 0.95),
                    arrowprops={"arrowstyle": "->"}, ha="center", fontsize=8)
    ax.set_xlim(0, total)
    ax.set_ylim(0, 1.1)
    ax.set_yticks([])
    ax.set_xlabel("byte offset")
    ax.set_title(title or f"{report.mode.value} splice, shift {report.shift} (0x{report.shift:X})",
                 fontsize=10)
    ax.legend(loc="upper center", bbox_to_anchor=(0.5, -0.45), ncol=2, fontsize=7, frameon=False)
    return _finish(fig, path)


def plot_findings(report: DetectionReport, length: int, path: Path, title: str = "") -> Path:
    """One row per finding, bar spanning its byte range, coloured by severity."""
    findings: Sequence = report.findings
    fig, ax = plt.subplots(figsize=(9, 0.6 + 0.35 * max(len(findings), 1)))
    for row, f in enumerate(findings):
        start, end = f.span
        ax.broken_barh([(start, max(end - start, length * 0.003))], (row - 0.35, 0.7),
                       facecolors=SEVERITY_COLORS[f.severity])
    ax.set_yticks(range(len(findings)))
    ax.set_yticklabels([f.kind.value for f in findings], fontsize=7)
    ax.set_xlim(0, max(length, 1))
    ax.invert_yaxis()
    ax.set_xlabel("byte offset")
    ax.set_title(title or f"verdict: {report.verdict.value} (claimed {report.claimed_type})",
                 fontsize=10)
    return _finish(fig, path)
