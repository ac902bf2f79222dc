"""Number handling shared by the whole package.

Probabilities, rewards and discount factors are plain Python numbers:
``int``/``Fraction`` in exact mode, ``float`` otherwise.  The two kinds mix
freely in arithmetic; exact-only code paths should call :func:`require_exact`
first.  A small Gaussian-elimination solver over ``Fraction`` backs every
exact policy-evaluation step; the matrices it sees (``I - gamma * P``) are
strictly diagonally dominant, hence always nonsingular.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence, Union

Num = Union[int, Fraction, float]


def parse_number(value) -> Num:
    """Parse a JSON-level number: int, float, decimal string, or "p/q" string."""
    if isinstance(value, bool):
        raise ValueError(f"expected a number, got {value!r}")
    if isinstance(value, (int, Fraction)):
        return value if isinstance(value, int) else value
    if isinstance(value, float):
        return value
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"cannot parse number {value!r}") from exc
    raise ValueError(f"expected a number, got {value!r}")


def is_exact(x: Num) -> bool:
    """True for numbers carrying no floating-point rounding."""
    return isinstance(x, (int, Fraction))


def as_fraction(x: Num) -> Fraction:
    """Exact conversion to Fraction (floats convert via their binary value)."""
    return x if isinstance(x, Fraction) else Fraction(x)


def emit_number(x: Num):
    """JSON-level encoding: exact numbers become "p/q" strings, floats stay."""
    if isinstance(x, (int, Fraction)):
        return str(Fraction(x))
    return float(x)


def require_exact(values, what: str) -> None:
    """Raise TypeError unless every number in `values` is rational."""
    for x in values:
        if not is_exact(x):
            raise TypeError(
                f"{what} requires exact rational numbers; "
                f"found float {x!r} (convert the game with to_exact())"
            )


def solve_linear(matrix: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]) -> list[Fraction]:
    """Solve a square rational linear system by Gaussian elimination.

    Pivoting picks the first nonzero entry in each column, which keeps the
    result deterministic; exact arithmetic needs no magnitude pivoting.
    """
    n = len(rhs)
    a = [list(row) + [rhs[i]] for i, row in enumerate(matrix)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col] != 0), None)
        if pivot is None:
            raise ZeroDivisionError("singular linear system")
        if pivot != col:
            a[col], a[pivot] = a[pivot], a[col]
        inv = Fraction(1, 1) / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                factor = a[r][col]
                a[r] = [x - factor * y for x, y in zip(a[r], a[col])]
    return [a[i][n] for i in range(n)]
