"""Cost annotation for a small imperative language, with indexed cost labels
that keep per-iteration costs exact through loop peeling and unrolling."""
from .cost import check_soundness, collapse_to_atoms, compute_kappa
from .dependent import build_dependent, eval_dependent, simplify
from .instrument import instrument_indexed, instrument_plain
from .labelling import label_indexed, label_plain, strip_labels
from .semantics import run
from .textio import parse_stmt, pretty_print
from .transform import apply_script, check_non_overlap, parse_script, peel, unroll
from .vm import lower, vm_run

__version__ = "0.1.0"
