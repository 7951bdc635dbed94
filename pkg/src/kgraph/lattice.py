"""Subgroups of Z^k kept in Hermite normal form."""
from sympy import Matrix
from sympy.matrices.normalforms import hermite_normal_form


def _hnf_rows(vectors, k):
    vectors = [tuple(int(a) for a in v) for v in vectors if any(v)]
    if not vectors:
        return ()
    h = hermite_normal_form(Matrix(vectors).T)
    rows = [tuple(int(a) for a in h.col(j)) for j in range(h.cols)]
    return tuple(sorted(r for r in rows if any(r)))


class PeriodGroup:
    """A subgroup of Z^k given by a canonical basis."""

    __slots__ = ("rank", "basis")

    def __init__(self, rank, generators=()):
        self.rank = rank
        self.basis = _hnf_rows(generators, rank)

    @classmethod
    def full(cls, rank):
        return cls(rank, [tuple(1 if i == j else 0 for j in range(rank)) for i in range(rank)])

    def __eq__(self, other):
        return (isinstance(other, PeriodGroup) and self.rank == other.rank
                and self.basis == other.basis)

    def __hash__(self):
        return hash((self.rank, self.basis))

    def __contains__(self, v):
        if not any(v):
            return True
        return _hnf_rows(list(self.basis) + [tuple(v)], self.rank) == self.basis

    def __le__(self, other):
        return all(b in other for b in self.basis)

    def __add__(self, other):
        return PeriodGroup(self.rank, list(self.basis) + list(other.basis))

    @property
    def is_trivial(self):
        return not self.basis

    @property
    def dimension(self):
        return len(self.basis)

    def __repr__(self):
        return f"PeriodGroup({[list(b) for b in self.basis]})"

    def to_json(self):
        return [list(b) for b in self.basis]
