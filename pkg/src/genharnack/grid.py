"""Uniform-grid samples of a function of one or two variables."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np


@dataclass
class GridFunction:
    """Samples of ``u`` on a uniform grid.

    Attributes
    ----------
    values : ndarray
        Shape ``(n,)`` in 1D or ``(nx, ny)`` in 2D, indexed ``[i, j] -> (x_i, y_j)``.
        When ``log_domain`` is set the array holds ``ln u``.
    h : float
        Grid spacing, shared by all axes.
    origin : tuple of float
        Coordinates of node ``[0]`` / ``[0, 0]``.
    log_domain : bool
        Whether ``values`` are logarithms of a positive function.
    meta : dict
        Free-form annotations (rescaling thresholds, provenance of the samples).
    """

    values: np.ndarray
    h: float
    origin: tuple = (0.0,)
    log_domain: bool = False
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim not in (1, 2):
            raise ValueError("grid functions are one- or two-dimensional")
        if not self.h > 0:
            raise ValueError("grid spacing must be positive")
        origin = tuple(float(o) for o in np.atleast_1d(self.origin))
        if len(origin) == 1 and self.values.ndim == 2:
            origin = origin * 2
        if len(origin) != self.values.ndim:
            raise ValueError("origin must have one coordinate per axis")
        self.origin = origin
        self.h = float(self.h)

    @property
    def dim(self) -> int:
        return self.values.ndim

    @property
    def shape(self):
        return self.values.shape

    def coords(self, axis: int = 0) -> np.ndarray:
        n = self.values.shape[axis]
        return self.origin[axis] + self.h * np.arange(n)

    def mesh(self):
        """Coordinate arrays broadcastable against ``values``."""
        if self.dim == 1:
            return (self.coords(0),)
        return tuple(np.meshgrid(self.coords(0), self.coords(1), indexing="ij"))

    def bounds(self):
        return [(self.origin[a], self.origin[a] + self.h * (self.values.shape[a] - 1)) for a in range(self.dim)]

    def log_values(self) -> np.ndarray:
        """``ln u`` regardless of storage; ``-inf`` where ``u == 0``."""
        if self.log_domain:
            return self.values
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.log(self.values)

    def linear_values(self) -> np.ndarray:
        """``u`` itself; underflows to zero for very negative log values."""
        return np.exp(self.values) if self.log_domain else self.values

    # -- constructors -------------------------------------------------------
    @classmethod
    def from_function(cls, fn, lo: float, hi: float, nodes: int, dim: int = 1, log_domain: bool = False):
        """Sample ``fn`` on ``[lo, hi]`` (or the square ``[lo, hi]^2``) with ``nodes`` per axis.

        ``fn`` receives coordinate arrays (``x`` or ``x, y`` in ``ij`` indexing) and must
        return ``u`` (or ``ln u`` when ``log_domain``).
        """
        if nodes < 2:
            raise ValueError("need at least two nodes per axis")
        x = np.linspace(lo, hi, nodes)
        h = (hi - lo) / (nodes - 1)
        if dim == 1:
            vals = fn(x)
        elif dim == 2:
            X, Y = np.meshgrid(x, x, indexing="ij")
            vals = fn(X, Y)
        else:
            raise ValueError("dim must be 1 or 2")
        vals = np.broadcast_to(np.asarray(vals, dtype=float), (nodes,) * dim).copy()
        return cls(vals, h, origin=(float(lo),) * dim, log_domain=log_domain)

    # -- CSV ----------------------------------------------------------------
    def to_csv(self) -> str:
        """Header row ``dim,origin,h,log_domain,shape``, a metadata row, then one value per line."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["dim", "origin", "h", "log_domain", "shape"])
        w.writerow([
            self.dim,
            " ".join(repr(o) for o in self.origin),
            repr(self.h),
            int(self.log_domain),
            " ".join(str(n) for n in self.values.shape),
        ])
        for v in self.values.ravel(order="C"):
            w.writerow([repr(float(v))])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "GridFunction":
        rows = [r for r in csv.reader(io.StringIO(text)) if r]
        if len(rows) < 2 or rows[0][:4] != ["dim", "origin", "h", "log_domain"]:
            raise ValueError("not a grid-function CSV")
        head = dict(zip(rows[0], rows[1]))
        dim = int(head["dim"])
        origin = tuple(float(o) for o in head["origin"].split())
        h = float(head["h"])
        log_domain = bool(int(head["log_domain"]))
        vals = np.array([float(r[0]) for r in rows[2:]])
        if "shape" in head:
            shape = tuple(int(n) for n in head["shape"].split())
        elif dim == 1:
            shape = (vals.size,)
        else:
            side = int(round(vals.size ** 0.5))
            shape = (side, side)
        if len(shape) != dim or int(np.prod(shape)) != vals.size:
            raise ValueError("value count does not match the declared shape")
        return cls(vals.reshape(shape), h, origin=origin, log_domain=log_domain)

    def save_csv(self, path) -> None:
        from .serialization import atomic_write_text

        atomic_write_text(path, self.to_csv())

    @classmethod
    def load_csv(cls, path) -> "GridFunction":
        with open(path, encoding="utf-8") as fh:
            return cls.from_csv(fh.read())
