"""Deterministic machine-readable reports.

Every solver run is summarized into a plain dict (JSON-serializable,
fixed key order, scalars printed exactly) plus a short human summary.
Timing is deliberately kept out of the JSON document so that identical
inputs produce byte-identical reports.
"""

from __future__ import annotations

import json
from typing import Dict, Hashable, List, Optional, Sequence

from crrigid.scalars import Scalar
from crrigid.linalg import Row
from crrigid.geometry import Source, Target
from crrigid.maps import MapGerm, nondegeneracy, transversality
from crrigid.parser import ProblemSpec
from crrigid.spaces import RigidityReport, GenericityCertificate, \
    VERDICT_RIGID_VANISHING, VERDICT_RIGID_TRIVIAL, VERDICT_INCONCLUSIVE


def _scalar_str(s: Scalar) -> str:
    return str(s)


def _vector_doc(vec: Row, jet_keys: Sequence[Hashable]) -> Dict[str, str]:
    """One kernel vector: real 4-jet coordinates, sorted by column."""
    out: Dict[str, str] = {}
    for c in sorted(vec):
        k = jet_keys[c // 2]
        part = "re" if c % 2 == 0 else "im"
        _, j, m, n = k
        out[f"{part} d{m}{n} V{j+1}"] = _scalar_str(vec[c])
    return out


def basis_doc(kernel: List[Row], jet_keys: Sequence[Hashable]
              ) -> List[Dict[str, str]]:
    return [_vector_doc(v, jet_keys) for v in kernel]


def check_doc(spec: ProblemSpec) -> Dict:
    H, src, tgt = spec.H, spec.source, spec.target
    doc: Dict = {"command": "check"}
    doc["target_levi_signature"] = list(tgt.levi_signature())
    doc["target_levi_nondegenerate"] = tgt.levi_nondegenerate()
    if H is not None:
        nd = nondegeneracy(H, src, tgt)
        doc["immersion"] = H.is_immersion()
        doc["transversal"] = transversality(H)
        doc["span_dims"] = nd.span_dims
        doc["k0"] = nd.k0
        doc["two_nondegenerate"] = nd.two_nondegenerate
        doc["s0"] = _scalar_str(nd.s0)
    return doc


def normal_coords_doc(spec: ProblemSpec, order: int = 8) -> Dict:
    src = spec.source
    doc: Dict = {"command": "normal-coords", "order": order}
    terms = {}
    for exp in sorted(src.Q.coeffs):
        if sum(e * w for e, w in zip(exp, src.Q.frame.weights)) <= order:
            name = " ".join(f"{v}^{e}" for v, e in zip(src.Q.frame.vars, exp)
                            if e)
            terms[name or "1"] = _scalar_str(src.Q.coeffs[exp])
    doc["Q"] = terms
    return doc


def deform_doc(sol, oracle=None) -> Dict:
    doc: Dict = {"command": "deform"}
    doc["dimension"] = sol.dim
    doc["stabilized"] = sol.stabilized
    doc["dims_by_order"] = {str(k): v for k, v in sorted(sol.dims.items(),
                                                        key=lambda kv: str(kv[0]))}
    doc["basis"] = basis_doc(sol.kernel_real, sol.jet_keys)
    if oracle is not None:
        doc["oracle_dimension"] = oracle.dim
        doc["oracle_stabilized"] = oracle.stabilized
        doc["oracle_agrees"] = oracle.dim == sol.dim
    return doc


def rigidity_doc(rep: RigidityReport) -> Dict:
    doc: Dict = {"command": "rigidity"}
    doc["dimension"] = rep.dim
    doc["stabilized"] = rep.stabilized
    doc["target_levi_nondegenerate"] = rep.levi_nondegenerate
    doc["automorphism_dimension"] = rep.aut_dim
    doc["trivial_dimension"] = rep.trivial_dim
    doc["trivial_contained"] = rep.trivial_contained
    doc["verdict"] = rep.verdict
    doc["basis"] = basis_doc(rep.deformations.kernel_real,
                             rep.deformations.jet_keys)
    return doc


def genericity_doc(cert: GenericityCertificate) -> Dict:
    return {
        "command": "genericity",
        "rank": cert.rank,
        "columns": cert.ncols,
        "full_rank": cert.certified,
        "free_slots": [list(map(str, k)) for k in cert.free_slots],
    }


def automorphisms_doc(aut) -> Dict:
    return {
        "command": "automorphisms",
        "dimension": aut.dim,
        "stabilized": aut.stabilized,
        "dims_by_order": {str(k): v for k, v in sorted(aut.dims.items())},
    }


def render(doc: Dict) -> str:
    """Canonical JSON text: stable ordering and spacing."""
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"


def summary_line(doc: Dict) -> str:
    cmd = doc.get("command")
    if cmd == "deform":
        tail = "" if doc["stabilized"] else " (NOT stabilized)"
        return f"dim hol_0(H) = {doc['dimension']}{tail}"
    if cmd == "rigidity":
        return (f"dim hol_0(H) = {doc['dimension']}, "
                f"verdict: {doc['verdict']}")
    if cmd == "genericity":
        state = "full rank" if doc["full_rank"] else "RANK DEFICIENT"
        return f"certificate rank {doc['rank']}/{doc['columns']}: {state}"
    if cmd == "check":
        return (f"transversal={doc.get('transversal')} "
                f"k0={doc.get('k0')} "
                f"levi_signature={doc.get('target_levi_signature')}")
    if cmd == "automorphisms":
        return f"dim hol_0(M') = {doc['dimension']}"
    return cmd or ""
