"""Almost-sure Büchi analysis of MDPs and SCC decomposition with symbolic-step accounting."""
from .engine import Exact, MoreThan, StateSet, StepLedger, SymbolicEngine
from .explicit import (
    OracleTooLarge,
    Verdict,
    VerdictStream,
    WinningSet,
    check_witness,
    classical_explicit,
    impr_algo,
    impr_win_lose,
    oracle_almost_sure,
    win_lose,
)
from .model import Digraph, MdpFormatError, MdpGraph, MemorylessStrategy, m1, parse_mdp, read_mdp, serialize_mdp, validate, write_mdp
from .scc import SccPartition, improved_scc_find, scc_diameters, scc_explicit, scc_find
from .symbolic import SymbolicSolveReport, smdv_symb_impr_algo, symb_classical, symb_impr_algo, symb_impr_win_lose

__all__ = [
    "Digraph",
    "Exact",
    "MdpFormatError",
    "MdpGraph",
    "MemorylessStrategy",
    "MoreThan",
    "OracleTooLarge",
    "SccPartition",
    "StateSet",
    "StepLedger",
    "SymbolicEngine",
    "SymbolicSolveReport",
    "Verdict",
    "VerdictStream",
    "WinningSet",
    "check_witness",
    "classical_explicit",
    "impr_algo",
    "impr_win_lose",
    "improved_scc_find",
    "m1",
    "oracle_almost_sure",
    "parse_mdp",
    "read_mdp",
    "scc_diameters",
    "scc_explicit",
    "scc_find",
    "serialize_mdp",
    "smdv_symb_impr_algo",
    "symb_classical",
    "symb_impr_algo",
    "symb_impr_win_lose",
    "validate",
    "win_lose",
    "write_mdp",
]
