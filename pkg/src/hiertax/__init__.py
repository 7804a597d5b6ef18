"""hiertax: hierarchical occupation-code classification over prefix-code taxonomies.

Coherent conditional-probability estimation for hierarchical multi-class
text classification: a prefix-code taxonomy tree, TF-IDF features, a
softmax trainer, bottom-up and top-down hierarchical estimators, per-level
evaluation metrics, coder-agreement statistics, stratified sampling, and a
long-tail synthetic corpus generator.
"""

from .datagen import (
    CorpusSpec,
    generate_corpus,
    kzis_structure_codes,
    leaf_probabilities,
    uniform_tree_codes,
)
from .documents import LabeledDocument, read_documents, write_documents
from .errors import HiertaxError
from .estimators import (
    HierarchicalEstimator,
    ProbabilityProfile,
    estimate,
    estimate_many,
    leaf_marginals_many,
    predict_path,
    profile_from_vector,
    top_k,
    train_bottom_up,
    train_top_down,
)
from .features import SparseVector, TfidfModel, fit_vocabulary, tokenize, vectorize
from .hierarchy import ClassCode, HierarchyTree, build_hierarchy, load_hierarchy
from .linear import SoftmaxModel, TrainConfig, cce_loss, predict_proba, train_softmax
from .metrics import (
    CoderTable,
    ConfusionMatrix,
    EvalRecord,
    agreement_rate,
    cohens_kappa,
    confusion_matrix,
    level_log_loss,
    path_accuracy,
    recall_at_k,
)
from .persist import load_estimator, load_softmax, save_estimator, save_softmax
from .sampling import SplitResult, stratified_sample, train_test_split

__version__ = "0.1.0"

__all__ = [
    "ClassCode",
    "CoderTable",
    "ConfusionMatrix",
    "CorpusSpec",
    "EvalRecord",
    "HierarchicalEstimator",
    "HierarchyTree",
    "HiertaxError",
    "LabeledDocument",
    "ProbabilityProfile",
    "SoftmaxModel",
    "SparseVector",
    "SplitResult",
    "TfidfModel",
    "TrainConfig",
    "agreement_rate",
    "build_hierarchy",
    "cce_loss",
    "cohens_kappa",
    "confusion_matrix",
    "estimate",
    "estimate_many",
    "fit_vocabulary",
    "generate_corpus",
    "kzis_structure_codes",
    "leaf_marginals_many",
    "leaf_probabilities",
    "level_log_loss",
    "load_estimator",
    "load_softmax",
    "load_hierarchy",
    "path_accuracy",
    "predict_path",
    "predict_proba",
    "profile_from_vector",
    "read_documents",
    "recall_at_k",
    "save_estimator",
    "save_softmax",
    "stratified_sample",
    "tokenize",
    "top_k",
    "train_bottom_up",
    "train_softmax",
    "train_test_split",
    "train_top_down",
    "uniform_tree_codes",
    "vectorize",
    "write_documents",
]
