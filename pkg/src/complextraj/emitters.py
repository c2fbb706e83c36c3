"""Artifact emission: CSV trajectories, JSON reports, SVG figures.

All writers are atomic (temp file in the destination directory, then
rename) and deterministic: floats are formatted with 17 significant
digits, which round-trips IEEE doubles exactly, and JSON keys are sorted.
The SVG writer is self-contained so figure reproduction needs no plotting
stack.
"""

from __future__ import annotations

import json
import math
import os
import tempfile

import numpy as np

from .integrate import Trajectory

JSON_SCHEMA_VERSION = 1

_PALETTE = (
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
    "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f",
)


def _atomic_write(path: str, data: str) -> None:
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(data)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def fmt17(value: float) -> str:
    """17-significant-digit decimal formatting; round-trips float64."""
    return format(float(value), ".17g")


def emit_csv(traj: Trajectory, path: str) -> None:
    """Write t,x_re,x_im[,p_re,p_im] rows; momenta columns only if present."""
    has_p = traj.momenta is not None
    lines = ["t,x_re,x_im,p_re,p_im" if has_p else "t,x_re,x_im"]
    for i, (t, x) in enumerate(zip(traj.times, traj.positions)):
        row = f"{fmt17(t)},{fmt17(x.real)},{fmt17(x.imag)}"
        if has_p:
            p = traj.momenta[i]
            row += f",{fmt17(p.real)},{fmt17(p.imag)}"
        lines.append(row)
    try:
        _atomic_write(path, "\n".join(lines) + "\n")
    except OSError as exc:
        raise OSError(f"emit_csv: cannot write {path}: {exc}") from exc


def parse_csv(path: str) -> Trajectory:
    """Re-read an emitted CSV; positions reproduce the originals bit for bit."""
    with open(path) as handle:
        header = handle.readline().strip().split(",")
        rows = [line.strip().split(",") for line in handle if line.strip()]
    times = np.array([float(r[0]) for r in rows])
    positions = np.array([complex(float(r[1]), float(r[2])) for r in rows])
    momenta = None
    if "p_re" in header:
        momenta = np.array([complex(float(r[3]), float(r[4])) for r in rows])
    from .integrate import StopKind, StopReason

    return Trajectory(
        times=times, positions=positions, momenta=momenta,
        stop=StopReason(StopKind.COMPLETED, {}), meta={"source": path},
    )


def emit_json(report: dict, path: str) -> None:
    """Write a schema-versioned JSON report with sorted keys."""
    payload = {"schema": JSON_SCHEMA_VERSION}
    payload.update(report)
    try:
        _atomic_write(path, json.dumps(payload, sort_keys=True, indent=2) + "\n")
    except OSError as exc:
        raise OSError(f"emit_json: cannot write {path}: {exc}") from exc
    except TypeError as exc:
        raise TypeError(f"emit_json: report for {path} is not JSON-serializable: {exc}") from exc


def emit_svg(
    trajectories,
    path: str,
    labels=None,
    title: str | None = None,
    size: int = 640,
) -> None:
    """Plot trajectories in the complex plane: Re(x) horizontal, Im(x)
    vertical, equal aspect, one polyline per trajectory, legend of initial
    points."""
    trajs = list(trajectories)
    if labels is None:
        labels = [f"x0={_label_complex(tr.meta.get('x0', tr.positions[0]))}" for tr in trajs]
    all_x = np.concatenate([tr.positions for tr in trajs])
    xr_min, xr_max = float(all_x.real.min()), float(all_x.real.max())
    xi_min, xi_max = float(all_x.imag.min()), float(all_x.imag.max())
    span_r = max(xr_max - xr_min, 1e-12)
    span_i = max(xi_max - xi_min, 1e-12)
    pad = 0.06 * max(span_r, span_i)
    xr_min -= pad; xr_max += pad; xi_min -= pad; xi_max += pad
    span_r = xr_max - xr_min
    span_i = xi_max - xi_min

    margin = 46
    inner = size - 2 * margin
    scale = inner / max(span_r, span_i)  # equal aspect
    width = int(2 * margin + span_r * scale)
    height = int(2 * margin + span_i * scale)

    def px(x):
        return margin + (x - xr_min) * scale

    def py(y):
        return height - margin - (y - xi_min) * scale

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        f'<rect x="{margin}" y="{margin}" width="{width - 2 * margin}" '
        f'height="{height - 2 * margin}" fill="none" stroke="#999" stroke-width="1"/>',
    ]
    if title:
        parts.append(
            f'<text x="{width / 2:.1f}" y="{margin - 14}" font-size="13" '
            f'text-anchor="middle" font-family="sans-serif">{title}</text>'
        )
    # axis labels with data ranges
    parts.append(
        f'<text x="{width / 2:.1f}" y="{height - 10}" font-size="11" text-anchor="middle" '
        f'font-family="sans-serif">x_re  [{xr_min:.3g}, {xr_max:.3g}]</text>'
    )
    parts.append(
        f'<text x="14" y="{height / 2:.1f}" font-size="11" text-anchor="middle" '
        f'font-family="sans-serif" transform="rotate(-90 14 {height / 2:.1f})">'
        f'x_im  [{xi_min:.3g}, {xi_max:.3g}]</text>'
    )
    # zero axes if inside the frame
    if xr_min < 0.0 < xr_max:
        parts.append(
            f'<line x1="{px(0):.2f}" y1="{margin}" x2="{px(0):.2f}" y2="{height - margin}" '
            f'stroke="#ddd" stroke-width="1"/>'
        )
    if xi_min < 0.0 < xi_max:
        parts.append(
            f'<line x1="{margin}" y1="{py(0):.2f}" x2="{width - margin}" y2="{py(0):.2f}" '
            f'stroke="#ddd" stroke-width="1"/>'
        )
    for idx, tr in enumerate(trajs):
        color = _PALETTE[idx % len(_PALETTE)]
        pts = " ".join(
            f"{px(x.real):.3f},{py(x.imag):.3f}" for x in tr.positions
        )
        parts.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.2"/>'
        )
    for idx, label in enumerate(labels):
        color = _PALETTE[idx % len(_PALETTE)]
        ly = margin + 14 + 14 * idx
        parts.append(
            f'<rect x="{width - margin - 120}" y="{ly - 8}" width="10" height="3" fill="{color}"/>'
        )
        parts.append(
            f'<text x="{width - margin - 106}" y="{ly - 3}" font-size="10" '
            f'font-family="sans-serif">{label}</text>'
        )
    parts.append("</svg>")
    try:
        _atomic_write(path, "\n".join(parts) + "\n")
    except OSError as exc:
        raise OSError(f"emit_svg: cannot write {path}: {exc}") from exc


def _label_complex(z) -> str:
    z = complex(z)
    if z.imag == 0.0:
        return f"{z.real:g}"
    return f"{z.real:g}{z.imag:+g}i"
