"""Shared numeric text formatting for reproducible reports and golden files."""

from __future__ import annotations


def sci12(x: float) -> str:
    """Format a real number in scientific notation with 12 significant digits."""
    x = float(x)
    if x == 0.0:
        x = 0.0  # fold -0.0 so output text is byte-stable
    return f"{x:.11e}"


def pair12(z: complex) -> str:
    """Real and imaginary parts, space separated, 12 significant digits each."""
    z = complex(z)
    return f"{sci12(z.real)} {sci12(z.imag)}"


def complex6(z: complex) -> str:
    """Compact ``a+bi`` form with 6 significant digits, used for edge labels."""
    z = complex(z)
    re = 0.0 if z.real == 0.0 else z.real
    im = 0.0 if z.imag == 0.0 else z.imag
    sign = "-" if im < 0 else "+"
    return f"{re:.5e}{sign}{abs(im):.5e}i"
