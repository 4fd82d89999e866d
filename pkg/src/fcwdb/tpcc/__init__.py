from .bench import Metrics, TpccConfig, run_benchmark
from .load import generate_initial
from .schema import tpcc_schema

__all__ = ["Metrics", "TpccConfig", "run_benchmark", "generate_initial", "tpcc_schema"]
