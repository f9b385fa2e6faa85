"""polyclass: classify polynomial systems up to support-set isomorphism.

The pipeline: parse a system, forget coefficients to get its support
family, encode the family as a vertex-partitioned graph, and compute a
canonical labeling.  The canonical text (format ``SSC1``) and its sha256
digest identify the isomorphism class; a keyed store and a small HTTP
service persist and look up known classes.
"""

from .canon import (
    CanonicalForm,
    CanonizationTimeout,
    ColoredPartition,
    DIGEST_ALGORITHM,
    FORMAT_VERSION,
    NodeCounts,
    SymmetryGenerators,
    canonical_form_of_system,
    canonical_labeling,
    form_from_text,
    refine,
    systems_isomorphic,
)
from .core import (
    ExponentTuple,
    Polynomial,
    PolySystem,
    SupportFamily,
    Term,
    format_system,
    make_polynomial,
    permute_family,
    permute_system,
    support_family,
)
from .encode import (
    EncodedGraph,
    IncidenceMatrix,
    dump_graph,
    encode_partitioned,
    encode_selfloop,
    graphs_isomorphic_via_poly,
    incidence_matrix,
    incidence_to_poly,
    load_graph,
    plain_graph,
)
from .generators import gen_cyclic, gen_katsura, gen_nash, gen_random
from .oracle import brute_force_family_isomorphic, brute_force_graph_isomorphic
from .parser import ParseError, parse_system

__version__ = "0.1.0"

__all__ = [
    "CanonicalForm",
    "CanonizationTimeout",
    "ColoredPartition",
    "DIGEST_ALGORITHM",
    "EncodedGraph",
    "ExponentTuple",
    "FORMAT_VERSION",
    "IncidenceMatrix",
    "NodeCounts",
    "ParseError",
    "Polynomial",
    "PolySystem",
    "SupportFamily",
    "SymmetryGenerators",
    "Term",
    "brute_force_family_isomorphic",
    "brute_force_graph_isomorphic",
    "canonical_form_of_system",
    "canonical_labeling",
    "dump_graph",
    "encode_partitioned",
    "encode_selfloop",
    "form_from_text",
    "format_system",
    "gen_cyclic",
    "gen_katsura",
    "gen_nash",
    "gen_random",
    "graphs_isomorphic_via_poly",
    "incidence_matrix",
    "incidence_to_poly",
    "load_graph",
    "make_polynomial",
    "parse_system",
    "permute_family",
    "permute_system",
    "plain_graph",
    "refine",
    "support_family",
    "systems_isomorphic",
]
