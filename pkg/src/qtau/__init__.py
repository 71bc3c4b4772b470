"""Exact checks of Schur Q-function expansions for the KW and BGW
tau-functions: cut-and-join series, Q-function sums, Virasoro and Hirota
identities."""

from .errors import UsageError
from .hirota import shift_times, verify_hirota_bkp, verify_hirota_kp
from .operators import (
    DiffOperator,
    build_JB,
    build_MB,
    build_virasoro_odd,
    build_W0,
    build_W1,
    conjugate_rescale,
    exp_action,
    verify_operator_identity,
)
from .partitions import StrictPartition, enumerate_strict, hook_eval_delta1, parse_partition
from .polyring import (
    HbarSeries,
    OddPolynomial,
    TwoSetPolynomial,
    poly_exp,
    poly_log,
    rescale_times,
    specialize_times,
)
from .qschur import (
    DELTA1,
    DELTA3_OVER_3,
    QMacTable,
    eval_q,
    q_function,
    q_mac,
    q_one_row,
    q_two_row,
    verify_cauchy,
    verify_hook,
)
from .report import VerificationReport
from .scalars import BETA, NU, SQRT2, CoeffScalar, Root2Number
from .tau import (
    bgw_r,
    kw_r,
    q_expansion_bgw,
    q_expansion_mm,
    tau_cutjoin,
    tau_hypergeometric,
    verify_conjecture,
    verify_perpart_relation,
    verify_virasoro,
)

__version__ = "0.1.0"
