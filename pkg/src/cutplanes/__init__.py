"""Exact cutting planes and stabbing planes proofs for linear systems over finite fields."""
from .exact import LinIneq, Polytope, lp_optimum
from .instances import (Cnf, GraphWithLabels, LinSystemFq, Restriction, complete_graph,
                        cycle_graph, lift_system, random_kxor, to_cnf, to_polytope, tseitin)
from .cp import CpProof, ScpDag, cp_to_scp, verify_cp, verify_scp
from .sp import SpProof, classify_all, verify_sp
from .refuter import refute_sp
from .translate import (compile_system, cp_to_pathlike, facelike_to_pathlike, pathlike_to_cp,
                        schrijver_lift, sp_star_to_facelike)
from .depthlab import (consistent_restriction, crux_select, expander_walk, lifted_walk,
                       orthogonal_2face_vector, res_depth)

__all__ = [
    "LinIneq", "Polytope", "lp_optimum", "Cnf", "GraphWithLabels", "LinSystemFq", "Restriction",
    "complete_graph", "cycle_graph", "lift_system", "random_kxor", "to_cnf", "to_polytope", "tseitin",
    "CpProof", "ScpDag", "cp_to_scp", "verify_cp", "verify_scp", "SpProof", "classify_all",
    "verify_sp", "refute_sp", "compile_system", "cp_to_pathlike", "facelike_to_pathlike",
    "pathlike_to_cp", "schrijver_lift", "sp_star_to_facelike", "consistent_restriction",
    "crux_select", "expander_walk", "lifted_walk", "orthogonal_2face_vector", "res_depth",
]
