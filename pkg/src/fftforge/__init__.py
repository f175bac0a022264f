"""Threadgroup-resident FFT decomposition engine.

Plans power-of-two FFTs against a parametric GPU model (registers,
threadgroup memory, bandwidth tiers), executes them on the host through
the same stage geometry, prices them with an analytic cost model, and
emits matching Metal compute-kernel source.
"""

from .butterflies import (
    butterfly_radix2,
    butterfly_radix4,
    butterfly_radix8_splitradix,
    mma_flop_ratio,
)
from .complex_core import cmul, twiddle, twiddle_chain
from .cost_model import CostEstimate, design_plan, estimate, fft_flops, rank_designs
from .four_step import FourStepPlan, build_four_step, execute_plan, execute_plan_inverse
from .msl import KernelSource, emit_four_step_kernels, emit_kernel, structural_check
from .oracle import ErrorReport, compare, naive_dft, naive_idft, random_signal
from .planner import (
    INTEL_EU,
    M1,
    DecompositionPlan,
    HardwareModel,
    max_local_fft,
    select_radix,
    synthesize,
)
from .stockham import FftPlan, StageDescriptor, count_barriers, execute, make_plan

__version__ = "0.1.0"

__all__ = [
    "CostEstimate",
    "DecompositionPlan",
    "ErrorReport",
    "FftPlan",
    "FourStepPlan",
    "HardwareModel",
    "INTEL_EU",
    "KernelSource",
    "M1",
    "StageDescriptor",
    "build_four_step",
    "butterfly_radix2",
    "butterfly_radix4",
    "butterfly_radix8_splitradix",
    "cmul",
    "compare",
    "count_barriers",
    "design_plan",
    "emit_four_step_kernels",
    "emit_kernel",
    "estimate",
    "execute",
    "execute_plan",
    "execute_plan_inverse",
    "fft_flops",
    "make_plan",
    "max_local_fft",
    "mma_flop_ratio",
    "naive_dft",
    "naive_idft",
    "random_signal",
    "rank_designs",
    "select_radix",
    "structural_check",
    "synthesize",
    "twiddle",
    "twiddle_chain",
]
