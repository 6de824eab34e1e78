"""Fixed-design kernel smoothing: kernel averages, local-linear trends,
time-varying AR(1) estimation, bandwidth selection and residual diagnostics."""

from .averages import DesignSeries, MomentMatrix, kernel_sums, moment_matrix, psi_hat
from .bandwidth import CvConfig, CvResult, cv_score, cv_scores, select_bandwidth
from .diagnostics import acf, bic_grid, diagnose, fit_arma_css, ljung_box, pacf
from .errors import (
    ConvergenceError,
    DataError,
    DegenerateDenominatorError,
    FixedKernError,
    InvalidBandwidthError,
    NumericalError,
    SingularDesignError,
)
from .experiments import RateParams, mc_table1, theta, verify_rate
from .kernels import EPANECHNIKOV, KERNELS, KernelSpec, get_kernel
from .local_linear import CurveEstimate, fit_local_linear, weights
from .pipeline import PipelineConfig, run_pipeline
from .tvar import TvarModel, TwoStepFit, fit_local_constant_phi, fit_two_step, simulate

__version__ = "0.1.0"
