"""Scenario report rendering: JSON, CSV, and a payoff chart.

write_report_files drops three artifacts per scenario into the report
directory: the canonical JSON report, a delimited payoffs table, and a
matplotlib bar chart of per-actor net deltas (gas overlaid), which is the
quickest way to eyeball whether an adversarial run actually hurt its target.
"""

from __future__ import annotations

import csv
import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .scenarios import PayoffReport


def render_text(report: PayoffReport) -> str:
    lines = [f"scenario: {report.scenario}"]
    width = max((len(a) for a in report.deltas), default=8)
    for actor in sorted(report.deltas):
        delta = report.deltas[actor]
        gas = report.gas_paid.get(actor, 0)
        lines.append(f"  {actor:<{width}}  delta {delta:+d}  (gas {gas})")
    lines.append(f"  fee sink +{report.fee_sink_delta}")
    for oid, state in sorted(report.order_states.items()):
        lines.append(f"  order {oid}: {state}")
    lines.append(f"  escrow residue: {report.escrow_residue}")
    if report.failures:
        lines.append("FAILURES:")
        lines.extend(f"  - {f}" for f in report.failures)
    else:
        lines.append("all expectations met")
    return "\n".join(lines)


def write_csv(report: PayoffReport, path: str) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["actor", "delta", "gas_paid"])
        for actor in sorted(report.deltas):
            writer.writerow([actor, report.deltas[actor],
                             report.gas_paid.get(actor, 0)])
        writer.writerow(["fee_sink", report.fee_sink_delta, ""])


def write_figure(report: PayoffReport, path: str) -> None:
    actors = sorted(report.deltas)
    deltas = [report.deltas[a] for a in actors]
    gas = [report.gas_paid.get(a, 0) for a in actors]

    fig, ax = plt.subplots(figsize=(max(4.0, 1.4 * len(actors) + 1.5), 3.2))
    colors = ["#2a9d8f" if d >= 0 else "#e76f51" for d in deltas]
    ax.bar(actors, deltas, color=colors, label="net delta")
    ax.bar(actors, [-g for g in gas], color="#777777", width=0.35,
           label="gas paid")
    ax.axhline(0, color="black", linewidth=0.8)
    ax.set_ylabel("tokens")
    ax.set_title(report.scenario)
    ax.legend(loc="best", fontsize="small")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def write_report_files(report: PayoffReport, out_dir: str) -> dict[str, str]:
    """Write report.json / payoffs.csv / payoffs.png; returns the paths."""
    os.makedirs(out_dir, exist_ok=True)
    paths = {
        "json": os.path.join(out_dir, f"{report.scenario}.report.json"),
        "csv": os.path.join(out_dir, f"{report.scenario}.payoffs.csv"),
        "png": os.path.join(out_dir, f"{report.scenario}.payoffs.png"),
    }
    with open(paths["json"], "w", encoding="utf-8") as fh:
        fh.write(report.to_json() + "\n")
    write_csv(report, paths["csv"])
    write_figure(report, paths["png"])
    return paths
