from .model import (
    LABEL_ANOMALY, LABEL_NORMAL, OilNet40, OilNet40Spec,
    dump_activations, predict, predict_batched,
)
from .checkpoint import Checkpoint, CheckpointError, load_checkpoint, save_checkpoint
from .train import (
    EpochRecord, TrainConfig, TrainReport, TrainingDiverged,
    make_example, materialize, train,
)
from .search import SearchSpace, TrialResult, random_search, trials_to_text

__all__ = [
    "LABEL_ANOMALY", "LABEL_NORMAL", "OilNet40", "OilNet40Spec",
    "dump_activations", "predict", "predict_batched",
    "Checkpoint", "CheckpointError", "load_checkpoint", "save_checkpoint",
    "EpochRecord", "TrainConfig", "TrainReport", "TrainingDiverged",
    "make_example", "materialize", "train",
    "SearchSpace", "TrialResult", "random_search", "trials_to_text",
]
