"""Almost-instantaneous FV codes: models, codecs, exact optimization."""

from .analysis import (
    ChainSolution,
    TreeStats,
    average_length,
    empirical_rate,
    empirical_rate_stats,
    length_bounds,
    stationary,
    tree_stats,
)
from .codec import (
    CodewordEntry,
    CodewordTable,
    Decoder,
    SymbolStream,
    codeword_table,
    decode,
    encode,
    transition_trace,
    tree_sequence,
)
from .framing import (
    elias_delta_decode,
    elias_delta_encode,
    pack_symbols,
    parse_container,
    read_container,
    unpack_symbols,
    write_container,
)
from .huffman import (
    build_huffman,
    huffman_pair_rate,
    huffman_rate,
    product_distribution,
)
from .ip_model import (
    IpInstance,
    LinearConstraint,
    VariableKey,
    build_ip_binary,
    build_ip_huffman_binary,
    build_ip_kary_two_tree,
    build_ip_ternary,
    default_depth,
    default_initial_cost,
    lp_dump,
)
from .model import (
    BINARY,
    TERNARY,
    AifvCode,
    CodeFamily,
    CodeTree,
    Node,
    SourceDistribution,
    ValidationReport,
    entropy,
    family_distribution,
    kary_two_tree,
    kraft_target,
    kraft_weight,
    make_distribution,
    serialize_code,
    serialize_tree,
    deserialize_code,
    deserialize_tree,
    validate_code,
    validate_tree,
)
from .optimizer import CostState, OptimizeResult, cost_update, optimize, trace_csv
from .solver import (
    SolverSolution,
    brute_force_pair,
    solution_dump,
    solution_to_tree,
    solve_exact,
)

__version__ = "0.1.0"
