"""CI-subset tests, m-DCI surveys and the closed-form predicates they are checked against.

A subset ``S`` is a CI-subset when every ``T`` with ``Cay(G, T) ~ Cay(G, S)``
is an automorphic image of ``S``.  At desk scale this is decided directly:
enumerate one representative per ``Aut(G)``-orbit of ``|S|``-subsets,
bucket them by canonical form, and look for a bucket holding more than one
orbit.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .digraph import cayley_digraph
from .errors import DomainError, ResourceError, ValidationError
from .cache import open_cache
from .groups import (
    AUT_CAP,
    Automorphism,
    ConnectionSet,
    FiniteGroup,
    automorphisms,
    burnside_orbit_count,
    orbit_partition,
    parse_group,
)
from .iso import VERTEX_CAP, canonical_form, find_isomorphism
from .perm import Perm

SURVEY_BUDGET = 10**7


@dataclass(frozen=True)
class CiVerdict:
    """Outcome of a CI test; a negative verdict carries a re-checkable certificate."""

    subset: ConnectionSet
    is_ci: bool
    violating_T: ConnectionSet | None = None
    digraph_isomorphism: Perm | None = None
    method: str = "canonical-survey"

    def to_dict(self) -> dict:
        return {
            "group": self.subset.group.descriptor(),
            "S": self.subset.render(),
            "is_ci": self.is_ci,
            "T": self.violating_T.render() if self.violating_T is not None else None,
            "isomorphism": list(self.digraph_isomorphism) if self.digraph_isomorphism is not None else None,
            "method": self.method,
        }


def cayley_isomorphic(G: FiniteGroup, S, T, aut_cap: int = AUT_CAP) -> Automorphism | None:
    """Some automorphism ``sigma`` of ``G`` with ``S^sigma = T``, or None."""
    s = tuple(sorted(set(S)))
    t = tuple(sorted(set(T)))
    if len(s) != len(t):
        return None
    for aut in automorphisms(G, cap=aut_cap):
        if aut.image_set(s) == t:
            return aut
    return None


# orbit representatives with canonical forms, cached per (G, m) -------------------


_REP_FORMS: dict[tuple[FiniteGroup, int], tuple[list, list, list]] = {}


def _canon(G: FiniteGroup, members, cap: int, cache_dir: str | None):
    D = cayley_digraph(G, members)
    if cache_dir:
        return open_cache(cache_dir).canonical_form(D, cap)
    return canonical_form(D, cap)


def _canon_hex(args) -> bytes:
    return _canon(*args).canonical_adjacency


def _rep_forms(G, m, workers=1, cap=VERTEX_CAP, aut_cap=AUT_CAP, cache_dir=None):
    key = (G, m)
    hit = _REP_FORMS.get(key)
    if hit is not None:
        return hit
    reps, sizes = orbit_partition(G, m, automorphisms(G, cap=aut_cap))
    jobs = [(G, r, cap, cache_dir) for r in reps]
    if workers > 1 and len(jobs) > 1:
        chunk = max(1, len(jobs) // (4 * workers))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            forms = list(pool.map(_canon_hex, jobs, chunksize=chunk))
    else:
        forms = [_canon_hex(job) for job in jobs]
    result = (reps, sizes, forms)
    _REP_FORMS[key] = result
    return result


def _check_budget(G: FiniteGroup, m: int, budget: int, aut_cap: int) -> tuple[int, int]:
    if not 1 <= m <= G.order - 1:
        raise DomainError(f"m must lie in [1, {G.order - 1}] (got {m})")
    total = math.comb(G.order - 1, m)
    count = burnside_orbit_count(G, m, automorphisms(G, cap=aut_cap))
    if count > budget or total > budget:
        raise ResourceError(
            f"{G.descriptor()} m={m}: {count} orbit representatives over {total} subsets "
            f"exceeds the budget {budget}; try the babai method or a smaller m"
        )
    return total, count


def ci_subset_test(
    G: FiniteGroup,
    S: ConnectionSet,
    budget: int = SURVEY_BUDGET,
    cap: int = VERTEX_CAP,
    aut_cap: int = AUT_CAP,
    cache_dir: str | None = None,
) -> CiVerdict:
    """Decide whether ``S`` is a CI-subset of ``G`` by canonical-form bucketing."""
    m = len(S)
    if m == 0:
        return CiVerdict(S, True)
    _check_budget(G, m, budget, aut_cap)
    reps, _, forms = _rep_forms(G, m, cap=cap, aut_cap=aut_cap, cache_dir=cache_dir)
    auts = automorphisms(G, cap=aut_cap)
    own_rep = min(a.image_set(S.members) for a in auts)
    source = cayley_digraph(G, S)
    target = _canon_hex((G, S.members, cap, cache_dir))
    for rep, form in zip(reps, forms):
        if form == target and rep != own_rep:
            T = ConnectionSet(G, rep)
            iso = find_isomorphism(source, cayley_digraph(G, T), cap)
            return CiVerdict(S, False, T, iso)
    return CiVerdict(S, True)


# surveys ------------------------------------------------------------------------------


@dataclass
class SurveyReport:
    group: str
    m: int
    total_subsets: int
    orbit_reps: int
    buckets: list[dict]
    mdci_holds: bool
    violations: list[CiVerdict] = field(default_factory=list)
    wall_time_ms: float | None = None

    def to_dict(self, timing: bool = True) -> dict:
        return {
            "group": self.group,
            "m": self.m,
            "total_subsets": self.total_subsets,
            "orbit_reps": self.orbit_reps,
            "buckets": self.buckets,
            "mdci_holds": self.mdci_holds,
            "violations": [v.to_dict() for v in self.violations],
            "wall_time_ms": round(self.wall_time_ms, 3) if timing and self.wall_time_ms is not None else None,
        }

    def to_json(self, timing: bool = True) -> str:
        return json.dumps(self.to_dict(timing), indent=2) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["bucket", "canonical_form", "orbit_ids", "orbit_sizes", "subsets", "representative"])
        for i, b in enumerate(self.buckets):
            writer.writerow([
                i,
                b["canonical_form"],
                " ".join(str(o["id"]) for o in b["orbits"]),
                " ".join(str(o["size"]) for o in b["orbits"]),
                sum(o["size"] for o in b["orbits"]),
                " ".join(b["orbits"][0]["rep"]),
            ])
        return buf.getvalue()

    def to_text(self) -> str:
        lines = [
            f"group {self.group}  m={self.m}",
            f"subsets {self.total_subsets}  orbit reps {self.orbit_reps}  buckets {len(self.buckets)}",
            f"mdci_holds {str(self.mdci_holds).lower()}  violations {len(self.violations)}",
        ]
        for v in self.violations[:10]:
            lines.append(f"  {{{', '.join(v.subset.render())}}} ~ {{{', '.join(v.violating_T.render())}}}")
        return "\n".join(lines) + "\n"


def mdci_survey(
    G: FiniteGroup,
    m: int,
    workers: int = 1,
    budget: int = SURVEY_BUDGET,
    cap: int = VERTEX_CAP,
    aut_cap: int = AUT_CAP,
    cache_dir: str | None = None,
) -> SurveyReport:
    """Bucket every ``Aut(G)``-orbit of ``m``-subsets by canonical form.

    ``G`` has the m-DCI property iff every bucket holds exactly one orbit.
    Buckets are ordered by canonical form bytes, so the report does not
    depend on the worker count.
    """
    if workers < 1:
        raise DomainError("worker count must be >= 1")
    start = time.perf_counter()
    total, _ = _check_budget(G, m, budget, aut_cap)
    reps, sizes, forms = _rep_forms(G, m, workers, cap, aut_cap, cache_dir)
    grouped: dict[bytes, list[int]] = {}
    for i, form in enumerate(forms):
        grouped.setdefault(form, []).append(i)
    buckets, violations = [], []
    for form in sorted(grouped):
        ids = grouped[form]
        buckets.append({
            "canonical_form": form.hex(),
            "orbits": [{"id": i, "size": sizes[i], "rep": [G.render(x) for x in reps[i]]} for i in ids],
        })
        if len(ids) > 1:
            S = ConnectionSet(G, reps[ids[0]])
            source = cayley_digraph(G, S)
            for other in ids[1:]:
                T = ConnectionSet(G, reps[other])
                iso = find_isomorphism(source, cayley_digraph(G, T), cap)
                violations.append(CiVerdict(S, False, T, iso))
    assert sum(sizes) == total
    elapsed = (time.perf_counter() - start) * 1000.0
    return SurveyReport(G.descriptor(), m, total, len(reps), buckets, not violations, violations, elapsed)


# certificates ---------------------------------------------------------------------------


def verify_certificate(cert: dict, aut_cap: int = 4 * AUT_CAP) -> tuple[bool, str]:
    """Re-check a negative verdict from its JSON form.

    The certificate must name the group, ``S``, ``T`` and a vertex map; it is
    valid iff the map is a digraph isomorphism ``Cay(G, S) -> Cay(G, T)`` and
    no automorphism of ``G`` carries ``S`` to ``T``.
    """
    try:
        G = parse_group(cert["group"])
        S = ConnectionSet(G, [G.parse_element(x) for x in cert["S"]])
        T = ConnectionSet(G, [G.parse_element(x) for x in cert["T"]])
        iso = cert.get("isomorphism")
    except (KeyError, TypeError) as exc:
        raise ValidationError(f"malformed certificate: missing {exc}") from None
    if len(S) != len(T):
        return False, "S and T differ in size"
    if iso is None or sorted(iso) != list(range(G.order)):
        return False, "isomorphism is not a permutation of the vertices"
    if cayley_digraph(G, S).relabel(iso) != cayley_digraph(G, T):
        return False, "the vertex map is not a digraph isomorphism"
    sigma = cayley_isomorphic(G, S, T, aut_cap)
    if sigma is not None:
        return False, f"S and T are Cayley isomorphic via {sigma.describe()}"
    return True, "ok"


def certificates_in(doc: dict) -> list[dict]:
    """Certificates inside a survey report, a single verdict or a witness pair."""
    if "violations" in doc:
        return list(doc["violations"])
    return [doc]


# closed-form predicates --------------------------------------------------------------------


def mdci_necessary_condition(n: int, m: int) -> bool:
    """Necessary condition for m-DCI: ``n`` odd and ``p^2 ∤ n`` for primes ``p <= m - 1``."""
    import sympy

    if n % 2 == 0:
        return False
    return all(p > m - 1 or n % (p * p) for p in sympy.factorint(n))


def prime_power_mdci_predicate(n: int, m: int) -> bool:
    """For ``n = p^l``: m-DCI holds iff ``p`` is odd and (``l = 1`` or ``m <= p``)."""
    import sympy

    factors = sympy.factorint(n)
    if n < 3 or len(factors) != 1:
        raise DomainError(f"n={n} is not a prime power >= 3")
    (p, ell), = factors.items()
    return p % 2 == 1 and (ell == 1 or m <= p)
