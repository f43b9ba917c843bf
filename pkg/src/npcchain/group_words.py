"""One import point for the group-theoretic toolkit.

Words and automorphisms live in ``words``, semidirect products and the
Bass tests in ``semidirect``, presentations and the chain graphs of groups
in ``graph_of_groups``, and the BS(1,2) model in ``bs12``.
"""
from .bs12 import DyadicAffine, amalgam_reduce, bs_demo, central_rewrite, evaluate  # noqa: F401
from .graph_of_groups import (Block, ChainAssembly, GraphOfGroups, Presentation, TerminalSpec,  # noqa: F401
                              assemble_chain, dump_presentations, example1_terminal, example2_terminal,
                              example3_terminal, parse_presentations)
from .semidirect import (MonodromyAction, SemidirectElement, bass_diagonal_test, bass_factor_test,  # noqa: F401
                         embed_homomorphism_test, embed_phi, is_free_basis, sd_multiply,
                         semidirect_normal_form)
from .words import (FreeAutomorphism, FreeWord, inverse, multiply, reduce)  # noqa: F401
