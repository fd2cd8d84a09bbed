"""Runtime multiplication counter used to instrument the precoders."""

from dataclasses import dataclass
import math


@dataclass
class MultCounter:
    """Tally of complex and real multiplications.

    Real multiplications fold into the complex total at four per complex
    multiplier, rounded up, the same convention used for the zone-based
    initial solution.
    """

    complex_mults: int = 0
    real_mults: int = 0

    def add(self, n: int) -> None:
        self.complex_mults += int(n)

    def add_real(self, n: int) -> None:
        self.real_mults += int(n)

    @property
    def total(self) -> int:
        return self.complex_mults + math.ceil(self.real_mults / 4)
