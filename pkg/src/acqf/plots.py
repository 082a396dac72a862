"""Plot emission: a dependency-free SVG power chart and PNG report figures.

The SVG writer is deliberately plain string assembly so its output is
byte-deterministic. The PNG helpers import matplotlib lazily (Agg) and are
informational companions to the CSV/JSON outputs, not part of the
byte-determinism contract.
"""
from __future__ import annotations

import math
import os

os.environ.setdefault("MPLBACKEND", "Agg")

_PALETTE = (
    "#1f77b4",
    "#d62728",
    "#2ca02c",
    "#9467bd",
    "#ff7f0e",
    "#8c564b",
    "#e377c2",
    "#7f7f7f",
)

_W, _H = 640, 420
_LEFT, _RIGHT, _TOP, _BOTTOM = 70, 470, 30, 370


def _series(cells) -> list[tuple[tuple[float, int], list]]:
    groups: dict[tuple[float, int], list] = {}
    for c in cells:
        groups.setdefault((c.bias_beta, c.trials), []).append(c)
    out = []
    for key in sorted(groups):
        out.append((key, sorted(groups[key], key=lambda c: c.n_systems)))
    return out


def render_power_svg(cells, path) -> None:
    """Line chart of detection power vs pool size, one polyline per beta
    (per (beta, trials) pair when the grid has several trial counts)."""
    cells = list(cells)
    if not cells:
        raise ValueError("no power cells to plot")
    ns = sorted({c.n_systems for c in cells})
    n_lo, n_hi = ns[0], ns[-1]
    if n_lo == n_hi:
        n_lo, n_hi = n_lo - 1, n_hi + 1
    many_trials = len({c.trials for c in cells}) > 1

    def sx(n: float) -> float:
        return _LEFT + (n - n_lo) * (_RIGHT - _LEFT) / (n_hi - n_lo)

    def sy(p: float) -> float:
        return _BOTTOM - p * (_BOTTOM - _TOP)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'viewBox="0 0 {_W} {_H}">',
        f'<rect x="0" y="0" width="{_W}" height="{_H}" fill="white"/>',
        '<text x="320" y="18" font-family="sans-serif" font-size="14" '
        'text-anchor="middle">Detection power vs pool size</text>',
    ]
    # axes
    parts.append(
        f'<line x1="{_LEFT}" y1="{_BOTTOM}" x2="{_RIGHT}" y2="{_BOTTOM}" '
        'stroke="black" stroke-width="1"/>'
    )
    parts.append(
        f'<line x1="{_LEFT}" y1="{_TOP}" x2="{_LEFT}" y2="{_BOTTOM}" '
        'stroke="black" stroke-width="1"/>'
    )
    # y ticks
    for i in range(5):
        p = i / 4.0
        y = sy(p)
        parts.append(
            f'<line x1="{_LEFT - 4}" y1="{y:.2f}" x2="{_LEFT}" y2="{y:.2f}" stroke="black"/>'
        )
        parts.append(
            f'<text x="{_LEFT - 8}" y="{y + 4:.2f}" font-family="sans-serif" '
            f'font-size="11" text-anchor="end">{p:.2f}</text>'
        )
    # x ticks: the grid values themselves when few, else a rounded spread
    if len(ns) <= 8:
        ticks = ns
    else:
        ticks = [round(n_lo + i * (n_hi - n_lo) / 5) for i in range(6)]
    for t in ticks:
        x = sx(t)
        parts.append(
            f'<line x1="{x:.2f}" y1="{_BOTTOM}" x2="{x:.2f}" y2="{_BOTTOM + 4}" stroke="black"/>'
        )
        parts.append(
            f'<text x="{x:.2f}" y="{_BOTTOM + 18}" font-family="sans-serif" '
            f'font-size="11" text-anchor="middle">{t}</text>'
        )
    parts.append(
        f'<text x="{(_LEFT + _RIGHT) // 2}" y="{_H - 10}" font-family="sans-serif" '
        'font-size="12" text-anchor="middle">systems N</text>'
    )
    parts.append(
        f'<text x="16" y="{(_TOP + _BOTTOM) // 2}" font-family="sans-serif" font-size="12" '
        f'text-anchor="middle" transform="rotate(-90 16 {(_TOP + _BOTTOM) // 2})">'
        "detection power</text>"
    )

    legend_y = _TOP + 6
    for idx, ((beta, trials), series) in enumerate(_series(cells)):
        color = _PALETTE[idx % len(_PALETTE)]
        pts = " ".join(f"{sx(c.n_systems):.2f},{sy(c.power):.2f}" for c in series)
        parts.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="2"/>'
        )
        for c in series:
            parts.append(
                f'<circle cx="{sx(c.n_systems):.2f}" cy="{sy(c.power):.2f}" r="3" '
                f'fill="{color}"/>'
            )
        label = f"beta={beta:g}" + (f", T={trials}" if many_trials else "")
        parts.append(
            f'<line x1="{_RIGHT + 12}" y1="{legend_y}" x2="{_RIGHT + 36}" y2="{legend_y}" '
            f'stroke="{color}" stroke-width="2"/>'
        )
        parts.append(
            f'<text x="{_RIGHT + 42}" y="{legend_y + 4}" font-family="sans-serif" '
            f'font-size="11">{label}</text>'
        )
        legend_y += 18
    parts.append("</svg>")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(parts) + "\n")


def save_power_png(cells, path) -> None:
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(7.0, 4.5), dpi=120)
    many_trials = len({c.trials for c in cells}) > 1
    for idx, ((beta, trials), series) in enumerate(_series(cells)):
        label = f"beta={beta:g}" + (f", T={trials}" if many_trials else "")
        ax.errorbar(
            [c.n_systems for c in series],
            [c.power for c in series],
            yerr=[c.stderr for c in series],
            marker="o",
            capsize=3,
            color=_PALETTE[idx % len(_PALETTE)],
            label=label,
        )
    ax.set_xlabel("systems N")
    ax.set_ylabel("detection power")
    ax.set_ylim(-0.02, 1.02)
    ax.set_title("Detection power vs pool size")
    ax.legend(loc="best", fontsize=9)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def save_audit_png(report, path) -> None:
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(7.0, 4.5), dpi=120)
    neglog = [-math.log10(st.p_value) for st in report.per_channel]
    ax.scatter(range(len(neglog)), neglog, s=14, color=_PALETTE[0])
    ax.axhline(-math.log10(report.alpha), color=_PALETTE[1], linestyle="--",
               label=f"alpha={report.alpha:g}")
    ax.set_xlabel("channel (sorted by key)")
    ax.set_ylabel("-log10 p-value")
    ax.set_title(
        f"Per-channel exact tests; verdict {report.verdict} "
        f"(fisher_p={report.fisher_p:.3g}, bonferroni_p={report.bonferroni_p:.3g})"
    )
    ax.legend(loc="best", fontsize=9)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def save_trajectory_png(positions, path) -> None:
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(7.0, 4.5), dpi=120)
    ax.plot(range(len(positions)), positions, color=_PALETTE[0], linewidth=1.0)
    ax.set_xlabel("step")
    ax.set_ylabel("position")
    ax.set_title("Chemotaxis trajectory")
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def save_summary_png(summary, path) -> None:
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(7.0, 4.5), dpi=120)
    reps = [r.replicate for r in summary.per_replicate]
    freqs = [r.macro_r_frequency for r in summary.per_replicate]
    ax.bar(reps, freqs, color=_PALETTE[0], label="macro R frequency")
    ax.axhline(summary.baseline_drift, color=_PALETTE[1], linestyle="--",
               label=f"Born baseline {summary.baseline_drift:.4f}")
    ax.set_xlabel("replicate")
    ax.set_ylabel("frequency of R")
    ax.set_ylim(0.0, 1.0)
    ax.set_title(f"Macro choice frequency ({summary.policy_kind}, beta={summary.bias_beta:g})")
    ax.legend(loc="best", fontsize=9)
    ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
