"""CSV / table output with a reproducibility header, and BER/FER figures."""

from __future__ import annotations

import math
import os
import subprocess
from pathlib import Path
from typing import Dict, List, Optional

from . import __version__
from .channel_sim import CSV_HEADER, SimStats

COLUMNS = CSV_HEADER.split(",")


def version_string() -> str:
    """Package version plus the short commit hash when run from a checkout."""
    here = Path(__file__).resolve().parent
    try:
        rev = subprocess.run(["git", "describe", "--always", "--dirty"], cwd=here,
                             capture_output=True, text=True, timeout=5)
        tag = rev.stdout.strip() if rev.returncode == 0 else ""
    except (OSError, subprocess.SubprocessError):
        tag = ""
    return f"polarlist {__version__}" + (f" ({tag})" if tag else "")


def config_lines(stats: SimStats, extra: Optional[Dict[str, object]] = None) -> List[str]:
    cfg = stats.config
    code = cfg.code
    crc = code.crc_spec.name if code.crc_spec is not None else "none"
    items = {
        "version": version_string(),
        "N": code.n_codeword,
        "K": code.k_info,
        "N_tx": code.n_transmitted,
        "crc": crc,
        "dec": cfg.decoder,
        "L": cfg.L,
        "prec": cfg.precision,
        "quant_scale": cfg.quant_scale if cfg.quant_scale is not None else "default",
        "nodes": cfg.pruning.label() if cfg.pruning is not None else "default",
        "psum": cfg.layout,
        "snr": " ".join(f"{v:g}" for v in cfg.ebn0),
        "max_frames": cfg.max_frames,
        "max_fe": cfg.max_fe,
        "seed": cfg.seed,
        "workers": cfg.workers,
        "timing": "on" if cfg.timing else "off",
    }
    if extra:
        items.update(extra)
    return [f"# {k}: {v}" for k, v in items.items()]


def format_table(stats: SimStats) -> str:
    rows = [COLUMNS] + [p.csv_row().split(",") for p in stats.points]
    widths = [max(len(r[i]) for r in rows) for i in range(len(COLUMNS))]
    return "\n".join("  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in rows) + "\n"


def render(stats: SimStats, fmt: str = "csv", extra=None) -> str:
    header = "\n".join(config_lines(stats, extra)) + "\n"
    if fmt == "csv":
        return header + stats.to_csv()
    if fmt == "table":
        return header + format_table(stats)
    raise ValueError(f"unknown format {fmt!r}")


def read_csv(path) -> List[Dict[str, float]]:
    """Data rows of a results file, comment lines skipped."""
    rows = []
    cols = None
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if cols is None:
                cols = line.split(",")
                continue
            rows.append({c: float(v) for c, v in zip(cols, line.split(","))})
    return rows


def plot_curves(stats: SimStats, path) -> Path:
    """BER and FER against Eb/N0 on a log axis, saved to ``path``."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    x = [p.ebn0_db for p in stats.points]
    fig, ax = plt.subplots(figsize=(6, 4.2))
    for name, vals, style in (("FER", [p.fer for p in stats.points], "o-"),
                              ("BER", [p.ber for p in stats.points], "s--")):
        keep = [(a, b) for a, b in zip(x, vals) if b > 0 and not math.isnan(b)]
        if keep:
            ax.semilogy(*zip(*keep), style, label=name)
    cfg = stats.config
    ax.set_xlabel("Eb/N0 (dB)")
    ax.set_ylabel("error rate")
    ax.set_title(f"({cfg.code.n_codeword},{cfg.code.k_info}) {cfg.decoder} L={cfg.L} {cfg.precision}-bit")
    ax.grid(True, which="both", alpha=0.3)
    if ax.get_legend_handles_labels()[0]:
        ax.legend()
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def write_report(stats: SimStats, out, fmt: str = "csv", plot: bool = True, extra=None) -> List[Path]:
    """Write the results file and, with ``plot``, a PNG next to it."""
    out = Path(out)
    if out.parent and not out.parent.exists():
        os.makedirs(out.parent, exist_ok=True)
    out.write_text(render(stats, fmt, extra))
    written = [out]
    if plot and stats.points:
        written.append(plot_curves(stats, out.with_suffix(".png")))
    return written
