"""Desk-scale structural Ramsey workbench.

Finite relational structures with partition arrow search, binary tree
embedding types with their tangent-number counts, and cofinite-certified
evaluation over rule-generated sequences of finite structures.
"""

from .structures import (
    Signature, FinStructure, SIG_ORDER, SIG_GRAPH,
    chain, graph, induced_substructure, is_embedding, enumerate_embeddings,
    embeds, are_isomorphic, enumerate_copies, theta_check, canonical_code,
    structure_from_code, age, chains_enumerator, cliques_enumerator,
    graphs_enumerator, jep_witness, cofinal_chain,
)
from .formulas import (
    Rel, Eq, ColorEq, Not, And, Or, Exists, ExistsCopy, TOP, BOTTOM,
    implies, free_variables, qf_eval, theta_formula, phi_bs_formula,
    color_oracle_from,
)
from .arrows import (
    Coloring, ArrowVerdict, chromatic_count, arrow_check, naive_arrow_check,
    degree_search,
)
from .trees import (
    meet, lex_less, e_less, is_antichain, meet_closure, embedding_type,
    same_embedding_type, is_devlin, tangent, enumerate_devlin_types,
    devlin_color, build_w0, antichain_x, check_w0_properties, check_w0_style,
    prune_perfect, find_all_types_in, PruningError, node_sort_key,
)
from .ultra import (
    FrechetVerdict, UltraElement, SequenceRule, ChainRule, CofinalChainRule,
    CustomRule, StructureSequence, project_copy, los_eval, copy_defined,
    age_union_check, is_trending, TrendReport, ColoringRule, ConstantColoring,
    PerturbedConstantColoring, DevlinChainColoring, CustomColoring,
    PerCoordColorings, internal_color, phi_bs_eval, select_s, transfer_shadow,
    TransferReport,
)

__version__ = "0.1.0"
