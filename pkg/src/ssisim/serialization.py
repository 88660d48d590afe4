"""Canonical encodings shared by every signed payload and every file format.

Binary rule (all signed payloads and hash preimages): fields are
concatenated in declaration order; integers are 8-byte big-endian;
byte strings are length-prefixed with an 8-byte big-endian count;
strings are their UTF-8 bytes, length-prefixed; lists are prefixed
with their item count as an 8-byte big-endian integer.

JSON rule (all exported files): UTF-8, compact separators, object keys
in the documented fixed order for each type, binary fields as lowercase
hex. Exports are bit-exact, so they are safe for golden tests.
"""

import hashlib
import json
import re
import struct

from .errors import ParseError

B58_ALPHABET = "123456789ABCDEFGHJKLMNPQRSTUVWXYZabcdefghijkmnopqrstuvwxyz"
_B58_INDEX = {c: i for i, c in enumerate(B58_ALPHABET)}
_HEX_RE = re.compile(r"^[0-9a-f]*$")


def sha256(data: bytes) -> bytes:
    return hashlib.sha256(data).digest()


# --- binary canonical encoding ----------------------------------------------


def encode_int(value: int) -> bytes:
    if value < 0:
        raise ValueError("canonical integers are non-negative")
    return struct.pack(">Q", value)


def encode_bytes(data: bytes) -> bytes:
    return struct.pack(">Q", len(data)) + data


def encode_str(text: str) -> bytes:
    return encode_bytes(text.encode("utf-8"))


def encode_parts(*parts) -> bytes:
    """Concatenate heterogeneous fields under the canonical binary rule.

    ints -> 8-byte big-endian; bytes -> length-prefixed; str -> UTF-8
    length-prefixed; list/tuple -> count-prefixed sequence of items.
    """
    out = bytearray()
    for part in parts:
        if isinstance(part, bool):
            raise TypeError("bool is not a canonical field type")
        if isinstance(part, int):
            out += encode_int(part)
        elif isinstance(part, bytes):
            out += encode_bytes(part)
        elif isinstance(part, str):
            out += encode_str(part)
        elif isinstance(part, (list, tuple)):
            out += encode_int(len(part))
            for item in part:
                out += encode_parts(item)
        else:
            raise TypeError(f"cannot canonically encode {type(part).__name__}")
    return bytes(out)


# --- base58 (Bitcoin alphabet, no checksum) ----------------------------------


def b58encode(data: bytes) -> str:
    zeros = len(data) - len(data.lstrip(b"\x00"))
    value = int.from_bytes(data, "big")
    digits = []
    while value > 0:
        value, rem = divmod(value, 58)
        digits.append(B58_ALPHABET[rem])
    return "1" * zeros + "".join(reversed(digits))


def b58decode(text: str) -> bytes:
    value = 0
    for char in text:
        try:
            value = value * 58 + _B58_INDEX[char]
        except KeyError:
            raise ParseError(f"invalid base58 character {char!r}") from None
    zeros = len(text) - len(text.lstrip("1"))
    body = value.to_bytes((value.bit_length() + 7) // 8, "big")
    return b"\x00" * zeros + body


# --- canonical JSON ----------------------------------------------------------


def canonical_json(obj) -> str:
    """Compact JSON with keys in insertion order (the documented order)."""
    return json.dumps(obj, separators=(",", ":"), ensure_ascii=False)


def canonical_json_bytes(obj) -> bytes:
    return canonical_json(obj).encode("utf-8")


def load_json(data: bytes):
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ParseError(f"not valid UTF-8: {exc}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"not valid JSON: {exc}") from None


# --- strict field extraction --------------------------------------------------


def expect_object(value, keys: tuple, where: str) -> dict:
    if not isinstance(value, dict):
        raise ParseError(f"{where}: expected object")
    if tuple(value.keys()) != keys:
        raise ParseError(f"{where}: keys must be exactly {list(keys)}, got {list(value.keys())}")
    return value


def expect_str(value, where: str) -> str:
    if not isinstance(value, str):
        raise ParseError(f"{where}: expected string")
    return value


def expect_int(value, where: str) -> int:
    if not isinstance(value, int) or isinstance(value, bool) or value < 0:
        raise ParseError(f"{where}: expected non-negative integer")
    return value


def expect_list(value, where: str) -> list:
    if not isinstance(value, list):
        raise ParseError(f"{where}: expected array")
    return value


def parse_hex(value, length: int | None, where: str) -> bytes:
    """Strict lowercase-hex decode; `length` is the expected byte count."""
    text = expect_str(value, where)
    if len(text) % 2 != 0 or not _HEX_RE.fullmatch(text):
        raise ParseError(f"{where}: expected lowercase hex")
    data = bytes.fromhex(text)
    if length is not None and len(data) != length:
        raise ParseError(f"{where}: expected {length} bytes, got {len(data)}")
    return data
