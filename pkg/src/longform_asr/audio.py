"""WAV input/output helpers."""

from __future__ import annotations

from pathlib import Path

import numpy as np
from scipy.io import wavfile

from .errors import InputError


def load_wav(path: str | Path) -> tuple[np.ndarray, int]:
    """Read a PCM16 or float32 WAV as mono float64 samples in [-1, 1].

    Multi-channel audio is downmixed by averaging the channels.
    """
    try:
        sample_rate, data = wavfile.read(str(path))
    except (OSError, ValueError) as exc:
        raise InputError(f"{path}: cannot read WAV ({exc})") from None
    if data.dtype == np.int16:
        samples = data.astype(np.float64) / 32768.0
    elif data.dtype == np.float32 or data.dtype == np.float64:
        samples = data.astype(np.float64)
    else:
        raise InputError(f"{path}: unsupported sample format {data.dtype}")
    if samples.ndim == 2:
        samples = samples.mean(axis=1)
    return samples, int(sample_rate)


def write_wav(path: str | Path, samples: np.ndarray, sample_rate: int) -> None:
    """Write mono float samples as PCM16."""
    pcm = np.clip(np.asarray(samples, dtype=np.float64), -1.0, 1.0)
    wavfile.write(str(path), sample_rate, (pcm * 32767.0).round().astype(np.int16))


def slice_samples(samples: np.ndarray, sample_rate: int, start_s: float, end_s: float) -> np.ndarray:
    a = max(0, int(round(start_s * sample_rate)))
    b = min(len(samples), int(round(end_s * sample_rate)))
    return samples[a:b]
