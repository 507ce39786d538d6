"""File formats: order CSV, scan CSV, alpha(iE) tables, report files.

All numeric columns are written with repr so a write/read cycle is
lossless in float64.  Comment lines start with `#`; scan files use
`# key = value` comments to carry metadata (n_slits, seed) through the
round trip.
"""

from __future__ import annotations

import warnings

import numpy as np

from .errors import DataFormatError
from .grating import AngularScan, OrderIntensities
from .lifshitz import TabulatedPolarizability

__all__ = [
    "NormalizationWarning",
    "load_orders_csv",
    "load_polarizability_table",
    "load_scan_csv",
    "read_report",
    "save_orders_csv",
    "save_scan_csv",
    "write_report",
]


class NormalizationWarning(UserWarning):
    """Loaded intensities did not sum to one and were renormalized."""


def _split_csv_line(line, lineno, n_cols):
    parts = [p.strip() for p in line.split(",")]
    if len(parts) not in n_cols:
        raise DataFormatError(
            f"expected {' or '.join(map(str, sorted(n_cols)))} columns, "
            f"got {len(parts)}", line=lineno)
    return parts


def save_orders_csv(path, intensities):
    """Write OrderIntensities as `n,intensity[,sigma]` CSV."""
    with_sigma = intensities.sigma is not None
    header = "n,intensity,sigma" if with_sigma else "n,intensity"
    rows = [header]
    for i, n in enumerate(intensities.orders):
        cells = [str(n), repr(float(intensities.intensity[i]))]
        if with_sigma:
            cells.append(repr(float(intensities.sigma[i])))
        rows.append(",".join(cells))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(rows) + "\n")


def load_orders_csv(path):
    """Read `n,intensity[,sigma]` CSV into OrderIntensities.

    Intensities whose sum differs from one by more than 1e-9 raise a
    NormalizationWarning and are renormalized (sigma rescaled along).
    """
    orders, values, sigmas = [], [], []
    has_sigma = None
    with open(path, "r", encoding="utf-8") as fh:
        body = fh.read()
    lineno = 0
    seen_header = False
    for lineno, raw in enumerate(body.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if not seen_header:
            cols = [c.strip().lower() for c in line.split(",")]
            if cols not in (["n", "intensity"], ["n", "intensity", "sigma"]):
                raise DataFormatError(
                    "header must be 'n,intensity' or 'n,intensity,sigma'",
                    line=lineno)
            has_sigma = len(cols) == 3
            seen_header = True
            continue
        parts = _split_csv_line(line, lineno, {3 if has_sigma else 2})
        try:
            n = int(parts[0])
        except ValueError:
            raise DataFormatError(f"order is not an integer: {parts[0]!r}",
                                  line=lineno) from None
        try:
            v = float(parts[1])
            s = float(parts[2]) if has_sigma else None
        except ValueError:
            raise DataFormatError(f"non-numeric value in row: {line!r}",
                                  line=lineno) from None
        if n in orders:
            raise DataFormatError(f"duplicate order {n}", line=lineno)
        if v < 0:
            raise DataFormatError(f"negative intensity {v!r}", line=lineno)
        if s is not None and s < 0:
            raise DataFormatError(f"negative sigma {s!r}", line=lineno)
        orders.append(n)
        values.append(v)
        if has_sigma:
            sigmas.append(s)
    if not seen_header:
        raise DataFormatError("no header line found", line=lineno or None)
    if not orders:
        raise DataFormatError("no data rows", line=lineno)
    idx = np.argsort(orders)
    orders = [orders[i] for i in idx]
    values = np.asarray(values, dtype=float)[idx]
    sig = np.asarray(sigmas, dtype=float)[idx] if has_sigma else None
    total = float(values.sum())
    if total <= 0:
        raise DataFormatError("intensities sum to zero")
    if abs(total - 1.0) > 1e-9:
        warnings.warn(
            f"intensities sum to {total!r}; renormalizing",
            NormalizationWarning, stacklevel=2)
    return OrderIntensities.from_raw(tuple(orders), values, sig)


def save_scan_csv(path, scan, metadata=None):
    """Write an AngularScan as `theta_rad,counts` CSV.

    n_slits travels in a `# n_slits = N` comment; extra metadata pairs
    are written the same way, insertion order preserved.
    """
    meta = {"n_slits": scan.n_slits}
    if metadata:
        meta.update(metadata)
    rows = [f"# {k} = {v}" for k, v in meta.items()]
    rows.append("theta_rad,counts")
    for t, v in zip(scan.angles, scan.values):
        rows.append(f"{float(t)!r},{float(v)!r}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(rows) + "\n")


def load_scan_csv(path):
    """Read a `theta_rad,counts` CSV into (AngularScan, metadata dict).

    `# key = value` comments become metadata; n_slits defaults to 1
    when absent.
    """
    with open(path, "r", encoding="utf-8") as fh:
        body = fh.read()
    meta = {}
    angles, values = [], []
    seen_header = False
    lineno = 0
    for lineno, raw in enumerate(body.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            inner = line[1:].strip()
            if "=" in inner:
                k, _, v = inner.partition("=")
                meta[k.strip()] = v.strip()
            continue
        if not seen_header:
            cols = [c.strip().lower() for c in line.split(",")]
            if cols != ["theta_rad", "counts"]:
                raise DataFormatError("header must be 'theta_rad,counts'",
                                      line=lineno)
            seen_header = True
            continue
        parts = _split_csv_line(line, lineno, {2})
        try:
            angles.append(float(parts[0]))
            values.append(float(parts[1]))
        except ValueError:
            raise DataFormatError(f"non-numeric value in row: {line!r}",
                                  line=lineno) from None
    if not seen_header:
        raise DataFormatError("no header line found", line=lineno or None)
    if len(angles) < 2:
        raise DataFormatError("need at least two scan samples", line=lineno)
    angles = np.asarray(angles)
    if not np.all(np.diff(angles) > 0):
        bad = int(np.nonzero(np.diff(angles) <= 0)[0][0])
        raise DataFormatError(
            f"angles must be strictly increasing (violated after sample "
            f"{bad})")
    try:
        n_slits = int(meta.get("n_slits", 1))
    except ValueError:
        raise DataFormatError(
            f"n_slits comment is not an integer: {meta['n_slits']!r}") \
            from None
    return AngularScan(angles, np.asarray(values), n_slits=n_slits), meta


def load_polarizability_table(path):
    """Read a two-column alpha(iE) table.

    Format: whitespace-separated `energy_ev  alpha_nm3` rows, `#`
    comments and blank lines ignored.  Energies must increase strictly
    from 0; alpha must be nonnegative and non-increasing.
    """
    energies, alphas = [], []
    with open(path, "r", encoding="utf-8") as fh:
        body = fh.read()
    lineno = 0
    for lineno, raw in enumerate(body.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise DataFormatError(
                f"expected 2 whitespace-separated columns, got {len(parts)}",
                line=lineno)
        try:
            e, a = float(parts[0]), float(parts[1])
        except ValueError:
            raise DataFormatError(f"non-numeric value in row: {line!r}",
                                  line=lineno) from None
        if energies and e <= energies[-1]:
            raise DataFormatError(
                f"energies must increase strictly ({e!r} after "
                f"{energies[-1]!r})", line=lineno)
        if a < 0:
            raise DataFormatError(f"negative alpha {a!r}", line=lineno)
        energies.append(e)
        alphas.append(a)
    if len(energies) < 2:
        raise DataFormatError("need at least two table rows", line=lineno)
    if energies[0] != 0.0:
        raise DataFormatError(
            f"first energy must be 0 (static limit), got {energies[0]!r}",
            line=1)
    if any(b > a for a, b in zip(alphas, alphas[1:])):
        raise DataFormatError("alpha must be non-increasing in energy")
    return TabulatedPolarizability(np.asarray(energies), np.asarray(alphas))


def write_report(path, items):
    """Write `key = value` report lines, insertion order preserved."""
    with open(path, "w", encoding="utf-8") as fh:
        for k, v in items:
            fh.write(f"{k} = {v}\n")


def read_report(path):
    """Read a report written by write_report back into an ordered dict."""
    out = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise DataFormatError("expected 'key = value'", line=lineno)
            k, _, v = line.partition("=")
            out[k.strip()] = v.strip()
    return out
