"""Hat-guessing games on graphs: constructions, strategies, verification."""

from .core import (
    Assignment,
    CapacityError,
    ContractError,
    Game,
    Graph,
    HatsError,
    LOSING,
    Provenance,
    RangeError,
    StructureError,
    UNKNOWN,
    Verdict,
    WINNING,
    assignment_at,
    assignment_index,
    complete_graph,
    almost_complete_graph,
    dump_game,
    game_from_json,
    game_to_json,
    hg_lower_bound,
    load_game,
    majorizes,
    value_list,
)
from .constructors import (
    ComposedGame,
    PetalSpec,
    blowup_second_min,
    clique_game,
    cone,
    game_26666,
    k5minus,
    lower_to,
    planar14,
    product,
    sum_lose,
    trefoil,
    windmill,
)
from .embedding import (
    face_trace,
    is_outerplanar_embedding,
    is_planar_embedding,
    trace_faces,
)
from .solver import SearchBudget, SolveResult, check_against_clique_theorem, solve_exact
from .strategy import (
    Guess,
    Strategy,
    TrapRow,
    TrapTable,
    adapt_majorized,
    clique_strategy,
    evaluate,
    k5minus_strategy,
    load_trap_table,
    validate_trap_table,
)
from .verifier import VerifyReport, verify_exhaustive, verify_sampled, win_histogram

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
