"""Term tables of the identity: loading, checksums, and conversions between the two notations."""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, field, replace
from fractions import Fraction
from importlib import resources
from typing import Optional, Sequence

from ..cusps import CalMDesc, Eta, FNrho, MDesc, Monomial
from ..exactmath import CycloNumber, CycloRing

F = Fraction
R28 = CycloRing(28)

IDENTITY_FILE = "identity_terms.txt"
DISSECTION_FILE = "dissection_terms.txt"

# F0 = eta(98 tau); Fk = f(98, 7k)
F_VALUATION = (F(49, 12),) + tuple(F((7 - k) ** 2, 4) for k in range(1, 8))
# multiplying by this F-monomial turns the weight-0 identity back into the weight-1/2 one
COMMON_FACTOR = (-15, 3, 3, 3, 1, 1, 1, 2)


class DigestError(ValueError):
    pass


def A_value(triple: Optional[tuple], ring: CycloRing = R28) -> CycloNumber:
    """x(z + z^6) + y(z^2 + z^5) + w(z^3 + z^4) with z = zeta_7; "none" means 1."""
    if triple is None:
        return ring.one()
    out = ring.zero()
    for coef, k in zip(triple, (1, 2, 3)):
        if coef:
            out = out + coef * (ring.root_of_unity(F(k, 7)) + ring.root_of_unity(F(7 - k, 7)))
    return out


@dataclass(frozen=True)
class Special:
    """Unit factor (one of 1, -1, i, -i) times N7(k) or the completed rank function at zeta_7."""

    kind: str  # "none", "N7", "M17"
    k: int = 0
    unit: int = 0  # power of i

    @classmethod
    def parse(cls, text: str) -> "Special":
        t = text.strip()
        if t == "none":
            return cls("none")
        m = re.fullmatch(r"(-?)(i\*)?(N7\(([1-6])\)|M17)", t)
        if not m:
            raise ValueError(f"unknown special factor {text!r}")
        unit = (1 if m.group(2) else 0) + (2 if m.group(1) else 0)
        if m.group(3) == "M17":
            return cls("M17", 0, unit)
        return cls("N7", int(m.group(4)), unit)

    def __str__(self) -> str:
        if self.kind == "none":
            return "none"
        sign = "-" if self.unit in (2, 3) else ""
        i = "i*" if self.unit % 2 else ""
        name = "M17" if self.kind == "M17" else f"N7({self.k})"
        return f"{sign}{i}{name}"

    def unit_value(self, ring: CycloRing = R28) -> CycloNumber:
        return ring.i**self.unit


@dataclass(frozen=True)
class IdentityTerm:
    scale: Fraction
    A_triple: Optional[tuple]
    exponents: tuple  # e0..e7
    special: Special = field(default_factory=lambda: Special("none"))

    def coefficient(self, ring: CycloRing = R28) -> CycloNumber:
        return A_value(self.A_triple, ring) * self.scale * self.special.unit_value(ring)

    @property
    def weight_twice(self) -> int:
        return sum(self.exponents) + (1 if self.special.kind != "none" else 0)

    @property
    def F_valuation(self) -> Fraction:
        return sum((e * v for e, v in zip(self.exponents, F_VALUATION)), F(0))

    def monomial(self) -> Monomial:
        """Descriptor product used for orders at cusps."""
        factors = []
        if self.exponents[0]:
            factors.append((Eta(98), self.exponents[0]))
        for k in range(1, 8):
            if self.exponents[k]:
                factors.append((FNrho(98, 7 * k), self.exponents[k]))
        if self.special.kind == "N7":
            factors.append((MDesc(self.special.k, 7, 98), 1))
        elif self.special.kind == "M17":
            factors.append((CalMDesc(1, 7), 1))
        return Monomial(tuple(factors), self.label())

    def label(self) -> str:
        trip = "none" if self.A_triple is None else "A(" + ",".join(map(str, self.A_triple)) + ")"
        mono = " ".join(f"F{k}^{e}" for k, e in enumerate(self.exponents) if e)
        return f"{self.scale}*{trip}*[{mono or '1'}]*{self.special}"

    def to_line(self) -> str:
        trip = "none" if self.A_triple is None else ",".join(map(str, self.A_triple))
        return f"{self.scale} | {trip} | {' '.join(map(str, self.exponents))} | {self.special}"


@dataclass(frozen=True)
class DissectionTerm:
    """scale * A(x,y,z) * q^qpow * prod J_a^(j_a) (times a Lambert sum) inside R_d."""

    d: int
    scale: Fraction
    A_triple: tuple
    qpow: int
    exponents: tuple  # j0..j7
    lambert: Optional[int] = None

    def to_line(self) -> str:
        special = "none" if self.lambert is None else f"lambert({self.lambert})"
        return (
            f"{self.d} | {self.scale} | {','.join(map(str, self.A_triple))} | {self.qpow} | "
            f"{' '.join(map(str, self.exponents))} | {special}"
        )


# -- file handling ---------------------------------------------------------------------------


def _data_text(name: str) -> str:
    return resources.files("qdissect").joinpath("data", name).read_text()


def _split(text: str) -> tuple[Optional[str], list[str]]:
    declared = None
    body = []
    for raw in text.splitlines():
        m = re.match(r"#\s*sha256:\s*([0-9a-f]{64})", raw.strip())
        if m:
            declared = m.group(1)
            continue
        line = raw.split("#", 1)[0].strip()
        if line:
            body.append(" | ".join(" ".join(f.split()) for f in line.split("|")))
    return declared, body


def digest_lines(lines: Sequence[str]) -> str:
    return hashlib.sha256("\n".join(lines).encode()).hexdigest()


def _check_digest(text: str, name: str, check: bool) -> list[str]:
    declared, body = _split(text)
    if check:
        if declared is None:
            raise DigestError(f"{name}: no embedded sha256 digest")
        actual = digest_lines(body)
        if actual != declared:
            raise DigestError(f"{name}: checksum mismatch (file {declared[:12]}..., content {actual[:12]}...)")
    return body


def _triple(text: str) -> Optional[tuple]:
    t = text.strip()
    if t == "none":
        return None
    parts = tuple(int(x) for x in t.split(","))
    if len(parts) != 3:
        raise ValueError(f"bad A-triple {text!r}")
    return parts


def parse_identity_line(line: str) -> IdentityTerm:
    fields = [f.strip() for f in line.split("|")]
    if len(fields) != 4:
        raise ValueError(f"expected 4 fields in {line!r}")
    exps = tuple(int(x) for x in fields[2].split())
    if len(exps) != 8:
        raise ValueError(f"expected exponents e0..e7 in {line!r}")
    return IdentityTerm(F(fields[0]), _triple(fields[1]), exps, Special.parse(fields[3]))


def parse_dissection_line(line: str) -> DissectionTerm:
    fields = [f.strip() for f in line.split("|")]
    if len(fields) != 6:
        raise ValueError(f"expected 6 fields in {line!r}")
    exps = tuple(int(x) for x in fields[4].split())
    if len(exps) != 8:
        raise ValueError(f"expected exponents j0..j7 in {line!r}")
    m = re.fullmatch(r"lambert\(([1-6])\)", fields[5])
    if fields[5] != "none" and not m:
        raise ValueError(f"unknown special {fields[5]!r}")
    trip = _triple(fields[2])
    if trip is None:
        raise ValueError("dissection terms need an A-triple")
    return DissectionTerm(int(fields[0]), F(fields[1]), trip, int(fields[3]), exps, int(m.group(1)) if m else None)


def load_identity_text(text: str, check_digest: bool = True, name: str = IDENTITY_FILE) -> list[IdentityTerm]:
    return [parse_identity_line(l) for l in _check_digest(text, name, check_digest)]


def build_identity_terms(text: Optional[str] = None, check_digest: bool = True) -> list[IdentityTerm]:
    """The weight-0 identity: the sum of these terms should vanish."""
    terms = load_identity_text(text if text is not None else _data_text(IDENTITY_FILE), check_digest)
    for t in terms:
        if t.weight_twice != 0:
            raise ValueError(f"term {t.label()} does not have weight 0")
    return terms


def build_dissection_terms(text: Optional[str] = None, check_digest: bool = True) -> list[DissectionTerm]:
    body = _check_digest(text if text is not None else _data_text(DISSECTION_FILE), DISSECTION_FILE, check_digest)
    return [parse_dissection_line(l) for l in body]


def identity_digest(terms: Sequence[IdentityTerm]) -> str:
    return digest_lines([t.to_line() for t in terms])


def render_identity_file(terms: Sequence[IdentityTerm], header: str = "") -> str:
    lines = [t.to_line() for t in terms]
    out = [header.rstrip("\n")] if header else []
    out.append(f"# sha256: {digest_lines(lines)}")
    return "\n".join(out + lines) + "\n"


# -- the two notations ---------------------------------------------------------------------------


def dissection_to_identity(thm: Sequence[DissectionTerm]) -> list[IdentityTerm]:
    """Rewrite the J-notation dissection as the weight-0 F-notation identity.

    With F0 = q^(49/12) J0(q^7) and Fk = q^((7-k)^2/4) Jk(q^7) J0(q^7), the J-monomial term
    q^d (q^7)^p prod J^j becomes an F-monomial with e_k = j_k and e0 = j0 - sum j_k; each Lambert
    term splits into A F0^3/(F_(2k) F7) - i A N7(k). The whole sum equals the completed rank
    function, which moves to the other side; everything is then divided by the common factor.
    """
    out = [IdentityTerm(F(-1), None, COMMON_FACTOR, Special("M17"))]
    for t in thm:
        if t.lambert is None:
            e = list(t.exponents)
            e[0] = t.exponents[0] - sum(t.exponents[1:])
            q_F = sum((x * v for x, v in zip(e, F_VALUATION)), F(0))
            if q_F != t.d + 7 * t.qpow:
                raise ValueError(f"q-power mismatch converting R_{t.d} term {t.A_triple}")
            out.append(IdentityTerm(t.scale, t.A_triple, tuple(x + c for x, c in zip(e, COMMON_FACTOR))))
        else:
            k = t.lambert
            e = [0] * 8
            e[0], e[2 * k], e[7] = 3, -1, -1
            out.append(IdentityTerm(t.scale, t.A_triple, tuple(x + c for x, c in zip(e, COMMON_FACTOR))))
            out.append(IdentityTerm(t.scale, t.A_triple, tuple(COMMON_FACTOR), Special("N7", k, 3)))
    return out


def same_terms(a: Sequence[IdentityTerm], b: Sequence[IdentityTerm]) -> list[str]:
    """Differences between two term lists as multisets."""
    from collections import Counter

    ca = Counter(x.to_line() for x in a)
    cb = Counter(x.to_line() for x in b)
    problems = [f"only in first: {l}" for l in (ca - cb).elements()]
    problems += [f"only in second: {l}" for l in (cb - ca).elements()]
    return problems


def mutate(terms: Sequence[IdentityTerm], index: int, **changes) -> list[IdentityTerm]:
    out = list(terms)
    out[index] = replace(out[index], **changes)
    return out
