"""Shared fixtures.

The expensive solver runs (pipeline at working order 17, oracle at
truncation 16/17) are memoized in a session-scoped cache so that the
unit tests and the acceptance gate share one computation per corpus
entry and route.
"""

import pytest

from crrigid.corpus import EXPECTATIONS, load_corpus
from crrigid.oracle import direct_solve, infinitesimal_automorphisms
from crrigid.pipeline import solve_deformation
from crrigid.spaces import decide_rigidity, genericity_certificate, trivial_subspace


class ComputeCache:
    def __init__(self):
        self._store = {}

    def _get(self, key, make):
        if key not in self._store:
            self._store[key] = make()
        return self._store[key]

    def spec(self, entry, order=24):
        return self._get(("spec", entry, order), lambda: load_corpus(entry, order))

    def pipeline(self, entry, work_order=None, cond_orders=None):
        exp = EXPECTATIONS[entry]
        if work_order is None:
            work_order = exp.work_order
        key = ("pipeline", entry, work_order, cond_orders)
        s = self.spec(entry)
        return self._get(key, lambda: solve_deformation(
            s.H, s.source, s.target, work_order=work_order,
            cond_orders=cond_orders))

    def oracle(self, entry, keq=None):
        exp = EXPECTATIONS[entry]
        if keq is None:
            keq = exp.oracle_order
        s = self.spec(entry)
        return self._get(("oracle", entry, keq), lambda: direct_solve(
            s.H, s.source, s.target, keq=keq))

    def automorphisms(self, entry, keq=None):
        if keq is None:
            keq = EXPECTATIONS[entry].aut_keq
        s = self.spec(entry)
        return self._get(("aut", entry, keq), lambda: infinitesimal_automorphisms(
            s.target, keq=keq))

    def trivial(self, entry):
        s = self.spec(entry)
        return self._get(("trivial", entry), lambda: trivial_subspace(
            s.H, s.source, s.target))

    def rigidity(self, entry, use_oracle=False):
        exp = EXPECTATIONS[entry]
        s = self.spec(entry)
        return self._get(("rigidity", entry, use_oracle), lambda: decide_rigidity(
            s.H, s.source, s.target, work_order=exp.work_order,
            use_oracle=use_oracle, oracle_keq=exp.oracle_order))

    def genericity(self, entry):
        s = self.spec(entry)
        return self._get(("genericity", entry), lambda: genericity_certificate(
            s.H, s.source, s.target))


@pytest.fixture(scope="session")
def cache():
    return ComputeCache()
