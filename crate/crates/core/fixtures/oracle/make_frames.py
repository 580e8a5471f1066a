"""Writes golden SEA1 frames plus frames.tsv (file, type, session, payload hex).

Independent of the Rust encoder so the two can be checked against each other.
"""
import struct
from pathlib import Path

OUT = Path(__file__).resolve().parent.parent / "frames"
TYPES = {"START": 1, "AUDIO": 2, "END": 3, "PARTIAL": 4, "FINAL": 5, "ERROR": 6}


def frame(kind, session, payload):
    return b"SEA1" + struct.pack(">BBxxQI", 1, TYPES[kind], session, len(payload)) + payload


def start(lang, rate):
    code = lang.encode()
    return struct.pack(">B", len(code)) + code + struct.pack(">IB", rate, 1)


def error(code, text):
    return struct.pack(">H", code) + text.encode()


CASES = [
    ("start_th.bin", "START", 1, start("th", 16000)),
    ("start_id.bin", "START", 0x0102030405060708, start("id", 16000)),
    ("audio.bin", "AUDIO", 1, struct.pack("<8h", 0, 1, -1, 32767, -32768, 256, -256, 12345)),
    ("end.bin", "END", 1, b""),
    ("partial.bin", "PARTIAL", 1, "saya makan".encode()),
    ("final.bin", "FINAL", 1, "saya makan nasi".encode()),
    ("final_th.bin", "FINAL", 2, "สวัสดี ครับ".encode()),
    ("final_empty.bin", "FINAL", 3, b""),
    ("error_unknown_language.bin", "ERROR", 1, error(1, "language \"xx\" is not loaded")),
    ("error_timeout.bin", "ERROR", 2**64 - 1, error(5, "session idle too long")),
]


def main():
    OUT.mkdir(exist_ok=True)
    rows = ["# file\ttype\tsession\tpayload_hex"]
    for name, kind, session, payload in CASES:
        (OUT / name).write_bytes(frame(kind, session, payload))
        rows.append("%s\t%s\t%d\t%s" % (name, kind, session, payload.hex()))
    (OUT / "frames.tsv").write_text("\n".join(rows) + "\n")


if __name__ == "__main__":
    main()
