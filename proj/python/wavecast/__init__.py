"""4-band wavelet denoising and SVR/LSTM time-series forecasting."""

from wavecast._core import (  # noqa: F401
    DataError,
    FilterBank,
    LstmParams,
    ShapeError,
    SvrModel,
    build_transform_matrix,
    default_filter_bank,
    denoise_signal,
    estimate_sigma,
    forward_transform,
    hard_threshold,
    inverse_multilevel,
    inverse_transform,
    kernel_eval,
    lstm_forecast,
    lstm_forward,
    lstm_params_init,
    lstm_step,
    mae,
    multilevel_transform,
    paper_verbatim_filter_bank,
    project_components,
    r_squared,
    recursive_forecast,
    rmse,
    run_comparison,
    train_lstm,
    train_svr,
    universal_threshold,
    validate_filter_bank,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
