import hashlib
import os
import sys


def mkdir(dir):
    os.makedirs(dir, exist_ok=True)


def compare(file1: str, file2: str):
    """Raise an error if two files have different bytes."""
    with open(file1, "rb") as f1, open(file2, "rb") as f2:
        bin1 = f1.read()
        bin2 = f2.read()
    if bin1 == bin2:
        return
    offset = next((i for i, (b1, b2) in enumerate(zip(bin1, bin2)) if b1 != b2), min(len(bin1), len(bin2)))
    raise RuntimeError(f"Files differ at byte {offset}. ({file1}, {file2})")


def split_chunks(items: list, size: int) -> list[list]:
    """Split a list into consecutive chunks of the given size."""
    return [items[i:i + size] for i in range(0, len(items), size)]


def file_digest(path: str) -> str:
    sha = hashlib.sha256()
    with open(path, "rb") as f:
        for block in iter(lambda: f.read(1 << 16), b""):
            sha.update(block)
    return sha.hexdigest()


def text_digest(*texts: str) -> str:
    sha = hashlib.sha256()
    for text in texts:
        sha.update(text.encode("utf-8"))
        sha.update(b"\x00")
    return sha.hexdigest()


def check_python_version(major, minor):
    sys_major = sys.version_info.major
    sys_minor = sys.version_info.minor
    if sys_major > major or (sys_major == major and sys_minor >= minor):
        return
    error_msg = f"Python{major}.{minor} or later required. (Running {sys_major}.{sys_minor})"
    raise RuntimeError(error_msg)
