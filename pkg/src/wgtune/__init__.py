"""Machine-learning autotuning of OpenCL workgroup sizes for stencil kernels."""
from .space import ConstraintContext, SampleTable, WorkgroupSize, baseline_param, oracle, performance, speedup, wg

__version__ = "0.1.0"

__all__ = ["ConstraintContext", "SampleTable", "WorkgroupSize", "baseline_param", "oracle", "performance", "speedup", "wg", "__version__"]
