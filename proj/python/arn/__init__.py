# Copyright 2026  ARN contributors
# Licensed under the Apache License, Version 2.0

"""Attentive recurrent network for time-domain speech enhancement."""

from ._arn import (
    ArnConfig,
    CheckpointError,
    CompatibilityError,
    ConfigurationError,
    CorruptHeaderError,
    DegenerateSignalError,
    DimensionError,
    Error,
    FormatError,
    Model,
    ParameterError,
    ShapeMismatchError,
    TruncatedPayloadError,
    lr_schedule,
    make_mixture,
    read_wav,
    si_snr_db,
    snr_db,
    trim_silence,
    write_wav,
)

__all__ = [
    "ArnConfig",
    "CheckpointError",
    "CompatibilityError",
    "ConfigurationError",
    "CorruptHeaderError",
    "DegenerateSignalError",
    "DimensionError",
    "Error",
    "FormatError",
    "Model",
    "ParameterError",
    "ShapeMismatchError",
    "TruncatedPayloadError",
    "lr_schedule",
    "make_mixture",
    "read_wav",
    "si_snr_db",
    "snr_db",
    "trim_silence",
    "write_wav",
]
