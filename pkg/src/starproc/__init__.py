"""Process semantics of star expressions: charts, bisimilarity, loop elimination,
solution extraction, crystallization and a proof checker for Milner's system."""

from .bisim import (
    bisimilarity_partition,
    collapse,
    exprs_bisimilar,
    is_one_collapsed,
    onebisimilar,
)
from .chart import OneChart, chart_from_dict, chart_to_dict, load_chart, make_chart, to_dot
from .elevation import elevate, lift_local_transfer, verify_elevation
from .errors import StarprocError
from .expr import EMPTY_STEP, ONE, ZERO, chart_of, parse, step, terminates, to_str
from .extract import (
    check_complete_solution,
    check_semantic_solution,
    collapse_solution,
    equiv_certificate,
    expressible,
    extract_solution,
)
from .gen import GenParams, axiom_rewrite, gen_expr, gen_llee_onechart
from .llee import (
    Witness,
    lee_holds,
    lee_refutation,
    llee_witness,
    validate_witness,
    witness_from_dict,
    witness_to_dict,
)
from .mil import check_proof, instantiate_axiom
from .transform import (
    connect_through,
    counterpart_function,
    crystallize,
    insulate,
    is_near_collapsed,
    is_twin_crystal,
    unravel_above,
)

__version__ = "0.1.0"
