"""Standalone MFCC reference used to produce fixtures/mfcc_sine_1khz.txt.

Written directly against numpy (no shared code with the Rust crate):
per-frame pre-emphasis 0.97, Hamming window, 512-point power spectrum,
23 triangular filters spaced on the 1127*ln(1+f/700) mel scale over
[20 Hz, 8 kHz], natural log floored at 1e-10, orthonormal DCT-II, 13 terms.
"""
import numpy as np

SR, FRAME, SHIFT, NFFT, NMEL, NCEP = 16000, 400, 160, 512, 23, 13


def mel(f):
    return 1127.0 * np.log(1.0 + f / 700.0)


def filterbank():
    lo, hi = mel(20.0), mel(SR / 2)
    step = (hi - lo) / (NMEL + 1)
    bins = mel(np.arange(NFFT // 2 + 1) * SR / NFFT)
    fb = np.zeros((NMEL, NFFT // 2 + 1))
    for j in range(NMEL):
        l, c, r = lo + j * step, lo + (j + 1) * step, lo + (j + 2) * step
        up = (bins > l) & (bins <= c)
        down = (bins > c) & (bins < r)
        fb[j, up] = (bins[up] - l) / (c - l)
        fb[j, down] = (r - bins[down]) / (r - c)
    return fb


def dct_matrix():
    i = np.arange(NCEP)[:, None]
    m = np.arange(NMEL)[None, :]
    d = np.sqrt(2.0 / NMEL) * np.cos(np.pi * i * (m + 0.5) / NMEL)
    d[0] *= np.sqrt(0.5)
    return d


def mfcc(signal):
    n = 1 + (len(signal) - FRAME) // SHIFT
    win = np.hamming(FRAME)
    fb, dct = filterbank(), dct_matrix()
    out = []
    for t in range(n):
        x = signal[t * SHIFT: t * SHIFT + FRAME].astype(np.float64)
        y = np.empty_like(x)
        y[0] = x[0] - 0.97 * x[0]
        y[1:] = x[1:] - 0.97 * x[:-1]
        spec = np.abs(np.fft.rfft(y * win, NFFT)) ** 2
        out.append(dct @ np.log(np.maximum(fb @ spec, 1e-10)))
    return np.array(out)


if __name__ == "__main__":
    i = np.arange(1600)
    sig = (0.5 * np.sin(2 * np.pi * 1000.0 * i / SR)).astype(np.float32)
    for row in mfcc(sig):
        print(" ".join(f"{v:.9f}" for v in row))
