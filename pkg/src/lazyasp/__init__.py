"""Answer set solving by forward chaining with lazy grounding."""
from .core import Atom, Builtin, Limits, ModelError, Program, Rule, atom_str
from .corpus import InstanceSpec, generate_instance, pinned
from .depgraph import ComponentOrder, assign_components, component_order, is_stratified
from .engine import AnswerSet, Engine, SearchConfig, SearchStats, solve
from .oracle import certify_generating, ground_bounded, is_answer_set, oracle_answer_sets
from .parser import ParseError, format_answer_set, format_program, parse_atoms, parse_files, parse_program

__version__ = "0.1.0"
