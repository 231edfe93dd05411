"""Composition featurisation: one-hot composition vectors, generic
property-table CBFVs with pluggable aggregation functions, and random
element tables as a domain-knowledge-free baseline.

A composition-based feature vector (CBFV) is built by looking up one row
of per-element property values for each constituent element and reducing
those rows with a set of aggregation functions; the blocks produced by
each aggregator are concatenated in order. The ``compvec`` representation
is the bare 118-entry fraction vector with no aggregation; ``fractional``
is the CBFV over the identity (one-hot) property table with the
weighted-mean, sum, range and variance aggregators, giving 4 x 118 = 472
dimensions.
"""

from __future__ import annotations

import csv
from importlib import resources
from pathlib import Path

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .exceptions import EmptyAggregatorSet, MissingProperty
from .formula import ATOMIC_NUMBER, ELEMENTS, N_ELEMENTS, Composition, parse_formula


def _as_composition(item) -> Composition:
    if isinstance(item, Composition):
        return item
    return parse_formula(item)


class PropertyTable:
    """A 118 x P table of per-element property values.

    Parameters
    ----------
    names : sequence of str
        One name per property column.
    matrix : ndarray of shape (118, P)
        Property values, ``nan`` marking missing entries.
    table_id : str
        Identifier used in representation provenance.
    """

    def __init__(self, names, matrix, table_id="custom"):
        names = list(names)
        matrix = np.asarray(matrix, dtype=float)
        if matrix.shape != (N_ELEMENTS, len(names)):
            raise ValueError(
                f"matrix shape {matrix.shape} does not match "
                f"({N_ELEMENTS}, {len(names)})"
            )
        if len(names) < 1:
            raise ValueError("property table needs at least one column")
        finite = np.isfinite(matrix) | np.isnan(matrix)
        if not finite.all():
            raise ValueError("property values must be finite or missing (nan)")
        self.names = names
        self.matrix = matrix
        self.matrix.flags.writeable = False
        self.table_id = table_id

    @property
    def n_properties(self) -> int:
        return len(self.names)

    @property
    def missing_mask(self) -> np.ndarray:
        return np.isnan(self.matrix)

    def rows_for(self, composition: Composition) -> np.ndarray:
        """Property rows for the constituent elements, in composition order.

        Raises :class:`MissingProperty` if any needed value is missing.
        """
        idx = [ATOMIC_NUMBER[s] - 1 for s in composition.symbols]
        rows = self.matrix[idx]
        if np.isnan(rows).any():
            bad = [
                (symbol, self.names[j])
                for i, symbol in enumerate(composition.symbols)
                for j in np.flatnonzero(np.isnan(rows[i]))
            ]
            raise MissingProperty(
                f"missing property values for {bad} in table {self.table_id!r}"
            )
        return rows

    @classmethod
    def identity(cls) -> "PropertyTable":
        """One-hot table: one indicator column per element."""
        return cls(list(ELEMENTS), np.eye(N_ELEMENTS), table_id="identity")

    @classmethod
    def random(cls, n_props: int, dist: str = "unit_normal", seed=None) -> "PropertyTable":
        """Random table of shape (118, n_props), deterministic given seed.

        ``unit_normal`` samples N(0, 1); ``normal_inv_dim`` samples
        N(0, 1/n_props).
        """
        if n_props < 1:
            raise ValueError("n_props must be >= 1")
        if dist == "unit_normal":
            scale = 1.0
        elif dist == "normal_inv_dim":
            scale = 1.0 / np.sqrt(n_props)
        else:
            raise ValueError(f"unknown distribution {dist!r}")
        rng = np.random.default_rng(seed)
        matrix = rng.normal(0.0, scale, size=(N_ELEMENTS, n_props))
        names = [f"rand{i}" for i in range(n_props)]
        return cls(names, matrix, table_id=f"random_table:{n_props},{seed},{dist}")

    @classmethod
    def from_csv(cls, path) -> "PropertyTable":
        """Load from CSV with header ``symbol,prop1,...``; blank cell = missing.

        Rows may cover any subset of elements; absent elements are missing
        for every property.
        """
        path = Path(path)
        with path.open(newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if not header or header[0] != "symbol" or len(header) < 2:
                raise ValueError(f"{path}: expected header 'symbol,prop1,...'")
            names = header[1:]
            matrix = np.full((N_ELEMENTS, len(names)), np.nan)
            for lineno, row in enumerate(reader, start=2):
                if not row:
                    continue
                symbol = row[0]
                if symbol not in ATOMIC_NUMBER:
                    raise ValueError(f"{path}:{lineno}: unknown element {symbol!r}")
                if len(row) != len(names) + 1:
                    raise ValueError(f"{path}:{lineno}: expected {len(names) + 1} cells")
                for j, cell in enumerate(row[1:]):
                    if cell.strip() != "":
                        matrix[ATOMIC_NUMBER[symbol] - 1, j] = float(cell)
        return cls(names, matrix, table_id=path.stem)

    @classmethod
    def demo(cls) -> "PropertyTable":
        """Bundled six-column demo table (standard reference data)."""
        with resources.as_file(
            resources.files("klococv.data").joinpath("demo_properties.csv")
        ) as path:
            table = cls.from_csv(path)
        table.table_id = "demo"
        return table

    def to_csv(self, path) -> None:
        with Path(path).open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["symbol"] + self.names)
            for i, symbol in enumerate(ELEMENTS):
                cells = [
                    "" if np.isnan(v) else np.format_float_positional(v, trim="-")
                    for v in self.matrix[i]
                ]
                writer.writerow([symbol] + cells)


def _weighted_mean(w, values, znums):
    return w @ values


def _col_sum(w, values, znums):
    return values.sum(axis=0)


def _col_range(w, values, znums):
    return values.max(axis=0) - values.min(axis=0)


def _weighted_variance(w, values, znums):
    # fraction-weighted population variance per column; 0 for one element
    mu = w @ values
    return w @ (values - mu) ** 2


def _col_min(w, values, znums):
    return values.min(axis=0)


def _col_max(w, values, znums):
    return values.max(axis=0)


def _mode(w, values, znums):
    # value row of the most prevalent element; ties -> lowest atomic number
    best = np.flatnonzero(w == w.max())
    return values[best[np.argmin(znums[best])]]


AGGREGATORS = {
    "weighted_mean": _weighted_mean,
    "sum": _col_sum,
    "range": _col_range,
    "variance": _weighted_variance,
    "min": _col_min,
    "max": _col_max,
    "mode": _mode,
}

DEFAULT_AGGREGATORS = ("weighted_mean", "sum", "range", "variance")


def check_aggregators(aggregators) -> tuple[str, ...]:
    """Validate an aggregator set: non-empty, known names, no duplicates."""
    aggregators = tuple(aggregators)
    if not aggregators:
        raise EmptyAggregatorSet("at least one aggregation function is required")
    unknown = [a for a in aggregators if a not in AGGREGATORS]
    if unknown:
        raise ValueError(f"unknown aggregators {unknown}; choose from {sorted(AGGREGATORS)}")
    if len(set(aggregators)) != len(aggregators):
        raise ValueError(f"duplicate aggregators in {aggregators}")
    return aggregators


def compvec(composition: Composition | str) -> np.ndarray:
    """118-entry vector of element fractions (one-hot style, no aggregation)."""
    composition = _as_composition(composition)
    out = np.zeros(N_ELEMENTS)
    for symbol, fraction in composition.fractions.items():
        out[ATOMIC_NUMBER[symbol] - 1] = fraction
    return out


def aggregate(
    composition: Composition | str,
    table: PropertyTable,
    aggregators=DEFAULT_AGGREGATORS,
) -> np.ndarray:
    """CBFV of a composition: per-aggregator P-length blocks, concatenated.

    weighted_mean is the fraction-weighted mean of each property over the
    constituent elements; sum/range/min/max reduce the raw values; variance
    is the fraction-weighted population variance; mode takes the value of
    the most prevalent element (ties to the lowest atomic number).
    """
    composition = _as_composition(composition)
    aggregators = check_aggregators(aggregators)
    values = table.rows_for(composition)
    w = np.array(list(composition.fractions.values()))
    znums = np.array([ATOMIC_NUMBER[s] for s in composition.symbols])
    blocks = [AGGREGATORS[name](w, values, znums) for name in aggregators]
    return np.concatenate(blocks)


def fractional(composition: Composition | str) -> np.ndarray:
    """472-dim one-hot CBFV: weighted_mean/sum/range/variance over the
    identity property table."""
    return aggregate(composition, PropertyTable.identity(), DEFAULT_AGGREGATORS)


class CompVecFeaturiser(TransformerMixin, BaseEstimator):
    """Stateless transformer from compositions (or formula strings) to the
    118-dim fraction vector.

    Examples
    --------
    >>> CompVecFeaturiser().fit_transform(["NaCl"]).shape
    (1, 118)
    """

    repr_id = "compvec"

    def fit(self, X=None, y=None):
        return self

    def transform(self, X) -> np.ndarray:
        rows = [compvec(item) for item in X]
        return np.array(rows).reshape(len(rows), N_ELEMENTS)

    @property
    def n_features_out(self) -> int:
        return N_ELEMENTS


class CBFVFeaturiser(TransformerMixin, BaseEstimator):
    """Transformer building CBFVs from a property table.

    Parameters
    ----------
    table : PropertyTable
        Per-element property values.
    aggregators : sequence of str, default weighted_mean/sum/range/variance
        Aggregation functions, applied in order.
    """

    def __init__(self, table=None, aggregators=DEFAULT_AGGREGATORS):
        self.table = table
        self.aggregators = aggregators

    def fit(self, X=None, y=None):
        self.table_ = self.table if self.table is not None else PropertyTable.demo()
        self.aggregators_ = check_aggregators(self.aggregators)
        return self

    def transform(self, X) -> np.ndarray:
        if not hasattr(self, "table_"):
            self.fit()
        rows = [aggregate(item, self.table_, self.aggregators_) for item in X]
        return np.array(rows).reshape(len(rows), self.n_features_out)

    @property
    def n_features_out(self) -> int:
        table = getattr(self, "table_", self.table)
        if table is None:
            table = PropertyTable.demo()
        return table.n_properties * len(tuple(self.aggregators))

    @property
    def repr_id(self) -> str:
        table = getattr(self, "table_", self.table)
        name = table.table_id if table is not None else "demo"
        return f"cbfv:{name}"


class FractionalFeaturiser(CBFVFeaturiser):
    """One-hot CBFV (472 dims): identity table with the default aggregators."""

    repr_id = "fractional"

    def __init__(self):
        super().__init__(table=PropertyTable.identity())


class RandomTableFeaturiser(CBFVFeaturiser):
    """CBFV over a seeded random element table (e.g. the 118 x 200 N(0,1)
    baseline, which featurises to 4 x 200 = 800 dimensions).

    Parameters
    ----------
    n_props : int, default 200
        Number of random properties per element.
    dist : {"unit_normal", "normal_inv_dim"}
        Sampling distribution: N(0, 1) or N(0, 1/n_props).
    seed : int or None
        Table draw is deterministic given the seed.
    """

    def __init__(self, n_props=200, dist="unit_normal", seed=None,
                 aggregators=DEFAULT_AGGREGATORS):
        self.n_props = n_props
        self.dist = dist
        self.seed = seed
        self.aggregators = aggregators

    def fit(self, X=None, y=None):
        self.table_ = PropertyTable.random(self.n_props, self.dist, self.seed)
        self.aggregators_ = check_aggregators(self.aggregators)
        return self

    @property
    def n_features_out(self) -> int:
        return self.n_props * len(tuple(self.aggregators))

    @property
    def repr_id(self) -> str:
        return f"random_table:{self.n_props},{self.seed},{self.dist}"


def write_features_csv(path, formulas, features) -> None:
    """Write a featurised dataset as ``formula,f0,f1,...,fN``."""
    features = np.asarray(features)
    if len(formulas) != len(features):
        raise ValueError("formulas and feature rows differ in length")
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["formula"] + [f"f{i}" for i in range(features.shape[1])])
        for formula, row in zip(formulas, features):
            writer.writerow([formula] + [repr(float(v)) for v in row])
