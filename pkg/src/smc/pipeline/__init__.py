from .experiment import EvalReport, ExperimentConfig, load_dataset, run_experiment, run_smc, run_ucp
from .seeds import derive_seed
from .splits import SplitPlan, stratified_folds
from .synthetic import (ComplementarySpec, SyntheticSpec, generate_complementary_views,
                        generate_synthetic_corpus)

__all__ = [
    "EvalReport", "ExperimentConfig", "load_dataset", "run_experiment", "run_smc", "run_ucp",
    "derive_seed", "SplitPlan", "stratified_folds", "ComplementarySpec", "SyntheticSpec",
    "generate_complementary_views", "generate_synthetic_corpus",
]
