"""Slack reports and their JSON / CSV serialisation."""
import csv
import json
from dataclasses import dataclass, field

import numpy as np


@dataclass
class VerificationReport:
    """Worst-case slack of one inequality over a sample set.

    ``checks`` holds sub-reports for compound audits; the parent's slack is
    the minimum over them and it passes only if all of them pass.
    """

    inequality: str
    n_samples: int
    min_slack: float
    argmin_point: complex
    passed: bool
    tolerance: float = 0.0
    checks: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    def to_dict(self):
        d = {
            "inequality": self.inequality,
            "n_samples": int(self.n_samples),
            "min_slack": _num(self.min_slack),
            "argmin_point": _point(self.argmin_point),
            "pass": bool(self.passed),
        }
        if self.tolerance:
            d["tolerance"] = float(self.tolerance)
        if self.extra:
            d["extra"] = {k: _jsonable(v) for k, v in self.extra.items()}
        if self.checks:
            d["checks"] = [c.to_dict() for c in self.checks]
        return d

    @classmethod
    def combine(cls, name, checks):
        worst = min(checks, key=lambda c: c.min_slack)
        return cls(
            name,
            max(c.n_samples for c in checks),
            worst.min_slack,
            worst.argmin_point,
            all(c.passed for c in checks),
            checks=list(checks),
        )


def report_from_slack(name, slack, points, tol=0.0):
    """Reduce pointwise slacks to a report; ties resolve to the first index."""
    slack = np.ravel(np.asarray(slack, dtype=float))
    points = np.ravel(np.asarray(points))
    i = int(np.argmin(slack))
    return VerificationReport(name, slack.size, float(slack[i]), complex(points[i]), bool(slack[i] >= -tol), float(tol))


def _num(x):
    x = float(x)
    return x if np.isfinite(x) else str(x)


def _point(z):
    if z is None:
        return None
    z = complex(z)
    return [z.real, z.imag]


def _jsonable(v):
    if isinstance(v, (complex, np.complexfloating)):
        return _point(v)
    if isinstance(v, (np.floating, float)):
        return _num(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.bool_,)):
        return bool(v)
    if isinstance(v, np.ndarray):
        return [_jsonable(x) for x in v.tolist()]
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if hasattr(v, "to_dict"):
        return v.to_dict()
    return v


def write_json(obj, path):
    with open(path, "w") as fh:
        json.dump(_jsonable(obj), fh, indent=2, sort_keys=True)
        fh.write("\n")


CSV_COLUMNS = ("z_re", "z_im", "grad_fd", "bound_local", "slack")


def write_csv(rows, path):
    """``rows`` is an iterable of ``(z, grad_fd, bound_local)``."""
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(CSV_COLUMNS)
        for z, g, b in rows:
            z = complex(z)
            wr.writerow([f"{z.real:.12g}", f"{z.imag:.12g}", f"{g:.12g}", f"{b:.12g}", f"{b - g:.12g}"])


def read_csv(path):
    with open(path, newline="") as fh:
        return [{k: float(v) for k, v in row.items()} for row in csv.DictReader(fh)]
