"""Python bindings for the time-frequency operator toolkit."""

from tfop._core import (  # noqa: F401
    ConfigError,
    DetBlock,
    Domain,
    GridSpec,
    NumericError,
    OperatorMatrix,
    PhaseSpec,
    SampledFunction,
    SingularSpectrum,
    StftArray,
    WeightSpec,
    WindowSpec,
    apply_kernel,
    default_config_json,
    fio_kernel,
    forward_dft,
    gaussian,
    gaussian_identity_check,
    h_profile,
    hs_kernel_identity,
    inf,
    interpolation_audit,
    inverse_dft,
    istft,
    l2_norm,
    lift_amplitude_xz,
    modulation_norm,
    nondegeneracy,
    op_fio,
    op_fio_rotated,
    op_pseudo,
    quadrature_integral,
    quantization_transfer,
    run_experiment_json,
    schatten_norm,
    singular_values,
    stft,
)

__all__ = [name for name in dir() if not name.startswith("_")]
