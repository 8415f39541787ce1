"""Fine-grained causality extraction from requirements with a recursive neural tensor network."""

__version__ = "0.1.0"

from .brat import Branching, export_corpus, export_tree, parse_standoff, read_standoff_dir
from .checkpoint import Checkpoint, load_checkpoint, save_checkpoint
from .embeddings import EmbeddingTable, PosWeighting, Vocab
from .labels import Label
from .metrics import f1_score, inter_annotator_agreement, score_trees, treebank_stats
from .rntn import RntnParams, forward_gold, greedy_parse, loss_and_grad
from .trainer import SplitSpec, TrainConfig, evaluate, predict, split_dataset, train
from .treebank import ParseTree, Token, parse_bracketed, read_treebank, serialize_bracketed

__all__ = [
    "Branching", "Checkpoint", "EmbeddingTable", "Label", "ParseTree", "PosWeighting",
    "RntnParams", "SplitSpec", "Token", "TrainConfig", "Vocab", "evaluate", "export_corpus",
    "export_tree", "f1_score", "forward_gold", "greedy_parse", "inter_annotator_agreement",
    "load_checkpoint", "loss_and_grad", "parse_bracketed", "parse_standoff", "predict",
    "read_standoff_dir", "read_treebank", "save_checkpoint", "score_trees",
    "serialize_bracketed", "split_dataset", "train", "treebank_stats",
]
