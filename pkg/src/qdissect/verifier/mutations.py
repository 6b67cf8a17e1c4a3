"""Fixed single-term corruptions of the identity table; every one must break the vanishing check."""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Sequence

from .terms import IdentityTerm, Special

F = Fraction


@dataclass(frozen=True)
class Mutation:
    name: str
    index: int
    changes: tuple = ()  # (field, value) pairs; empty means drop the term

    def apply(self, terms: Sequence[IdentityTerm]) -> list[IdentityTerm]:
        out = list(terms)
        if not 0 <= self.index < len(out):
            raise IndexError(f"term index {self.index} out of range")
        if not self.changes:
            del out[self.index]
        else:
            out[self.index] = replace(out[self.index], **dict(self.changes))
        return out


def _shift_exps(e: Sequence[int], **delta) -> tuple:
    out = list(e)
    for k, v in delta.items():
        out[int(k[1:])] += v
    return tuple(out)


def _base() -> list[IdentityTerm]:
    from .terms import build_identity_terms

    return build_identity_terms()


def fixed_mutations() -> list[Mutation]:
    t = _base()
    return [
        Mutation("first term x+1", 0, (("A_triple", (-15, -8, -8)),)),
        Mutation("term 5 scale doubled", 5, (("scale", F(2)),)),
        Mutation("half scale read as 1", 20, (("scale", F(1)),)),
        Mutation("F-exponents moved within weight 0", 10, (("exponents", _shift_exps(t[10].exponents, e3=1, e4=-1)),)),
        Mutation("rank-function term dropped", 61),
        Mutation("N7(2) unit -i read as i", 58, (("special", Special("N7", 2, 1)),)),
        Mutation("A(-8,0-6) read as A(-8,0,6)", 55, (("A_triple", (-8, 0, 6)),)),
        Mutation("F2 and F5 exponents swapped", 30, (("exponents", _swap(t[30].exponents, 2, 5)),)),
        Mutation("Lambert partner F7 moved to the denominator", 56, (("exponents", _shift_exps(t[56].exponents, e0=2, e7=-2)),)),
        Mutation("rank-function sign flipped", 61, (("scale", F(1)),)),
    ]


def _swap(e: Sequence[int], i: int, j: int) -> tuple:
    out = list(e)
    out[i], out[j] = out[j], out[i]
    return tuple(out)


def perturb_term(terms: Sequence[IdentityTerm], index: int) -> list[IdentityTerm]:
    """The CLI test hook: add 1 to x in the A-triple, or negate the scale when there is none."""
    t = terms[index]
    if t.A_triple is None:
        return Mutation("negate", index, (("scale", -t.scale),)).apply(terms)
    x, y, z = t.A_triple
    return Mutation("x+1", index, (("A_triple", (x + 1, y, z)),)).apply(terms)
