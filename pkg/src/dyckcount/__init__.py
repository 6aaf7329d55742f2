"""Small recurrent networks on Dyck and shuffle languages: corpora, exact oracles, training."""

from .languages import (Corpus, GrammarParams, LanguageSpec, ParenPair, build_corpus, build_task_splits,
                        dyck, sample_grammar, shuffle, shuffle_strings, task_language)
from .oracles import (brute_force_next_symbols, corpus_stats, depth_profile, membership, next_symbols,
                      target_sequence)
from .encoding import (code_to_set, decode_prediction, encode_one_hot, k_hot, presentation_code,
                       reduce_dyck_n_to_2)
from .nets import NetParams, NetTrace, backward, forward, gradient_check, init_params, mse_loss, step
from .optim import AdamState, adam_update
from .harness import (TrainConfig, classify_sequence, evaluate, last_closing_task, run_experiment,
                      single_unit_experiment, train)

__version__ = "0.1.0"
