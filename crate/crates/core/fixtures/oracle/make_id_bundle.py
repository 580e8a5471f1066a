"""Regenerates fixtures/bundle/id/{utterance.wav,scorer.table,transcript.txt}.

The table scorer is keyed by frame index, so it ignores the audio: it
favours the HMM states of the target sentence in a fixed left-to-right
alignment and gives every other state a flat penalty.
"""
import math
import struct
import wave
from pathlib import Path

HERE = Path(__file__).resolve().parent.parent
BUNDLE = HERE / "bundle" / "id"
RATE = 16000
SECONDS = 1.2
SENTENCE = ["saya", "makan", "nasi"]
FAVOURED, OTHER = 0.0, -6.0


def units():
    out = []
    for line in (HERE / "indonesian.inv").read_text(encoding="utf-8").splitlines():
        line = line.split("#")[0].rstrip()
        if line.strip():
            out.append(line.split("\t")[0].strip())
    return out


def lexicon():
    lex = {}
    for line in (BUNDLE / "lexicon.dict").read_text(encoding="utf-8").splitlines():
        word, pron = line.split("\t")
        lex[word] = pron.split()
    return lex


def frames(n_samples, length=400, shift=160):
    return 1 + (n_samples - length) // shift


def main():
    n = int(RATE * SECONDS)
    state = 12345
    samples = []
    for i in range(n):
        t = i / RATE
        f0 = 110 + 40 * math.sin(2 * math.pi * 1.3 * t)
        env = 0.5 + 0.5 * math.sin(2 * math.pi * 3.0 * t) ** 2
        v = sum(math.sin(2 * math.pi * f0 * h * t) / h for h in range(1, 6))
        state = (1103515245 * state + 12345) % 2**31
        noise = state / 2**31 - 0.5
        samples.append(max(-32768, min(32767, int(6000 * env * v + 300 * noise))))
    with wave.open(str(BUNDLE / "utterance.wav"), "wb") as w:
        w.setnchannels(1)
        w.setsampwidth(2)
        w.setframerate(RATE)
        w.writeframes(struct.pack("<%dh" % n, *samples))

    index = {u: i for i, u in enumerate(units())}
    lex = lexicon()
    pdfs = [3 * index[p] + k for word in SENTENCE for p in lex[word] for k in range(3)]
    total = frames(n)
    per, extra = divmod(total, len(pdfs))
    lines = ["# frame-indexed scores for: " + " ".join(SENTENCE), "table %g" % OTHER]
    frame = 0
    for j, pdf in enumerate(pdfs):
        for _ in range(per + (1 if j >= len(pdfs) - extra else 0)):
            lines.append("%d %d %g" % (pdf, frame, FAVOURED))
            frame += 1
    assert frame == total
    (BUNDLE / "scorer.table").write_text("\n".join(lines) + "\n", encoding="utf-8")
    (BUNDLE / "transcript.txt").write_text(" ".join(SENTENCE) + "\n", encoding="utf-8")


if __name__ == "__main__":
    main()
