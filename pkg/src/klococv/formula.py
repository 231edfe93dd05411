"""Chemical formula parsing into normalised element compositions.

Formulas are plain stoichiometric strings over the 118 IUPAC elements:
element symbols with optional positive decimal counts and arbitrarily
nested parenthesised groups with multipliers, e.g. ``YBa2Cu3O7``,
``Ca(OH)2``, ``Fe0.5Co0.5``. Hydrate dots, charges and whitespace are
rejected rather than silently stripped.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exceptions import MalformedFormula, NonPositiveCount, UnknownElement

# The 118 IUPAC element symbols, ordered by atomic number (index + 1).
ELEMENTS = (
    "H", "He", "Li", "Be", "B", "C", "N", "O", "F", "Ne",
    "Na", "Mg", "Al", "Si", "P", "S", "Cl", "Ar", "K", "Ca",
    "Sc", "Ti", "V", "Cr", "Mn", "Fe", "Co", "Ni", "Cu", "Zn",
    "Ga", "Ge", "As", "Se", "Br", "Kr", "Rb", "Sr", "Y", "Zr",
    "Nb", "Mo", "Tc", "Ru", "Rh", "Pd", "Ag", "Cd", "In", "Sn",
    "Sb", "Te", "I", "Xe", "Cs", "Ba", "La", "Ce", "Pr", "Nd",
    "Pm", "Sm", "Eu", "Gd", "Tb", "Dy", "Ho", "Er", "Tm", "Yb",
    "Lu", "Hf", "Ta", "W", "Re", "Os", "Ir", "Pt", "Au", "Hg",
    "Tl", "Pb", "Bi", "Po", "At", "Rn", "Fr", "Ra", "Ac", "Th",
    "Pa", "U", "Np", "Pu", "Am", "Cm", "Bk", "Cf", "Es", "Fm",
    "Md", "No", "Lr", "Rf", "Db", "Sg", "Bh", "Hs", "Mt", "Ds",
    "Rg", "Cn", "Nh", "Fl", "Mc", "Lv", "Ts", "Og",
)

N_ELEMENTS = len(ELEMENTS)

ATOMIC_NUMBER = {symbol: z for z, symbol in enumerate(ELEMENTS, start=1)}


def element_index(symbol: str) -> int:
    """Zero-based feature index of an element (atomic number - 1)."""
    try:
        return ATOMIC_NUMBER[symbol] - 1
    except KeyError:
        raise UnknownElement(f"unknown element symbol {symbol!r}") from None


@dataclass(frozen=True)
class Composition:
    """A compound as a map from element symbol to positive amount.

    ``amounts`` holds the raw stoichiometry in first-mention order;
    ``fractions`` are the amounts divided by their total and sum to 1.
    """

    amounts: dict[str, float]
    _fractions: dict[str, float] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not self.amounts:
            raise MalformedFormula("composition must contain at least one element")
        for symbol, amount in self.amounts.items():
            if symbol not in ATOMIC_NUMBER:
                raise UnknownElement(f"unknown element symbol {symbol!r}")
            if not (amount > 0) or not np.isfinite(amount):
                raise NonPositiveCount(
                    f"amount for {symbol} must be a positive finite number, got {amount!r}"
                )
        total = sum(self.amounts.values())
        object.__setattr__(
            self,
            "_fractions",
            {symbol: amount / total for symbol, amount in self.amounts.items()},
        )

    @property
    def fractions(self) -> dict[str, float]:
        """Element fractions; values sum to 1 within 1e-12."""
        return dict(self._fractions)

    @property
    def symbols(self) -> tuple[str, ...]:
        return tuple(self.amounts)

    @property
    def total(self) -> float:
        return sum(self.amounts.values())

    def __len__(self) -> int:
        return len(self.amounts)


def _read_number(text: str, pos: int) -> tuple[float | None, int]:
    """Read an optional decimal count starting at ``pos``.

    Returns (value, new_pos); value is None when no digits are present.
    """
    start = pos
    n = len(text)
    while pos < n and text[pos].isdigit():
        pos += 1
    if pos < n and text[pos] == ".":
        pos += 1
        digits_after = pos
        while pos < n and text[pos].isdigit():
            pos += 1
        if pos == digits_after or digits_after - 1 == start:
            raise MalformedFormula(
                f"malformed number at position {start} in {text!r}"
            )
    if pos == start:
        return None, pos
    return float(text[start:pos]), pos


def _parse_group(text: str, pos: int, depth: int) -> tuple[dict[str, float], int]:
    """Parse a sequence of tokens until end of string or a closing paren."""
    amounts: dict[str, float] = {}
    n = len(text)
    saw_token = False
    while pos < n:
        ch = text[pos]
        if ch == ")":
            if depth == 0:
                raise MalformedFormula(
                    f"unbalanced ')' at position {pos} in {text!r}"
                )
            if not saw_token:
                raise MalformedFormula(f"empty group at position {pos} in {text!r}")
            return amounts, pos
        if ch == "(":
            inner, pos = _parse_group(text, pos + 1, depth + 1)
            if pos >= n or text[pos] != ")":
                raise MalformedFormula(f"unbalanced '(' in {text!r}")
            pos += 1
            multiplier, pos = _read_number(text, pos)
            if multiplier is None:
                multiplier = 1.0
            elif multiplier <= 0:
                raise NonPositiveCount(
                    f"group multiplier must be positive in {text!r}"
                )
            for symbol, amount in inner.items():
                amounts[symbol] = amounts.get(symbol, 0.0) + amount * multiplier
            saw_token = True
            continue
        if ch.isupper():
            end = pos + 1
            if end < n and text[end].islower():
                end += 1
            symbol = text[pos:end]
            if symbol not in ATOMIC_NUMBER:
                raise UnknownElement(
                    f"unknown element symbol {symbol!r} at position {pos} in {text!r}"
                )
            pos = end
            count, pos = _read_number(text, pos)
            if count is None:
                count = 1.0
            elif count <= 0:
                raise NonPositiveCount(
                    f"count for {symbol} must be positive in {text!r}"
                )
            amounts[symbol] = amounts.get(symbol, 0.0) + count
            saw_token = True
            continue
        raise MalformedFormula(
            f"unexpected character {ch!r} at position {pos} in {text!r}"
        )
    return amounts, pos


def parse_formula(text: str) -> Composition:
    """Parse a formula string into a :class:`Composition`.

    Repeated mentions of an element accumulate (``H2OH`` gives H:3, O:1).
    Raises :class:`UnknownElement`, :class:`MalformedFormula` or
    :class:`NonPositiveCount` on invalid input.
    """
    if not isinstance(text, str) or not text:
        raise MalformedFormula("formula must be a non-empty string")
    amounts, pos = _parse_group(text, 0, depth=0)
    if pos != len(text):
        raise MalformedFormula(f"unbalanced ')' at position {pos} in {text!r}")
    if not amounts:
        raise MalformedFormula(f"no elements found in {text!r}")
    return Composition(amounts)


def normalize(composition: Composition) -> Composition:
    """Rescale amounts to sum to 1. Fractions are unchanged; idempotent."""
    total = composition.total
    return Composition(
        {symbol: amount / total for symbol, amount in composition.amounts.items()}
    )


def _format_amount(amount: float) -> str:
    if amount == 1:
        return ""
    if amount == int(amount):
        return str(int(amount))
    # positional formatting so the grammar can re-read any float exactly
    return np.format_float_positional(amount, trim="-")


def to_formula(composition: Composition) -> str:
    """Canonical formula text: elements in atomic-number order.

    ``parse_formula(to_formula(c))`` reproduces the fractions of ``c``.
    """
    items = sorted(composition.amounts.items(), key=lambda kv: ATOMIC_NUMBER[kv[0]])
    return "".join(symbol + _format_amount(amount) for symbol, amount in items)
