"""Merkle tree over salted attribute commitments.

Leaf and interior hashes are domain-separated (0x00 / 0x01 prefixes) and
leaf counts are padded to the next power of two with a fixed padding
leaf, so every proof has an unambiguous shape.
"""

from dataclasses import dataclass

from .errors import ParseError
from .serialization import expect_object, expect_str, parse_hex, sha256

PADDING_LEAF = sha256(b"\x02ssisim/merkle/padding/v1")


def leaf_hash(data: bytes) -> bytes:
    return sha256(b"\x00" + data)


def node_hash(left: bytes, right: bytes) -> bytes:
    return sha256(b"\x01" + left + right)


@dataclass(frozen=True)
class PathStep:
    sibling: bytes
    sibling_on_left: bool

    def to_json_dict(self) -> dict:
        return {"sibling": self.sibling.hex(), "side": "left" if self.sibling_on_left else "right"}

    @classmethod
    def from_json_dict(cls, value) -> "PathStep":
        obj = expect_object(value, ("sibling", "side"), "merkle path step")
        side = expect_str(obj["side"], "side")
        if side not in ("left", "right"):
            raise ParseError(f"merkle path side must be 'left' or 'right', got {side!r}")
        return cls(sibling=parse_hex(obj["sibling"], 32, "sibling"), sibling_on_left=side == "left")


def _padded(leaves: list) -> list:
    size = 1
    while size < len(leaves):
        size *= 2
    return list(leaves) + [PADDING_LEAF] * (size - len(leaves))


def _levels(leaves: list) -> list:
    levels = [_padded(leaves)]
    while len(levels[-1]) > 1:
        prev = levels[-1]
        levels.append([node_hash(prev[i], prev[i + 1]) for i in range(0, len(prev), 2)])
    return levels


def merkle_root(leaves: list) -> bytes:
    if not leaves:
        raise ValueError("merkle tree needs at least one leaf")
    return _levels(leaves)[-1][0]


def merkle_path(leaves: list, index: int) -> tuple:
    """Authentication path for leaves[index], bottom-up."""
    if not 0 <= index < len(leaves):
        raise IndexError(f"leaf index {index} out of range")
    path = []
    pos = index
    for level in _levels(leaves)[:-1]:
        sibling_pos = pos - 1 if pos % 2 else pos + 1
        path.append(PathStep(sibling=level[sibling_pos], sibling_on_left=sibling_pos < pos))
        pos //= 2
    return tuple(path)


def verify_path(leaf: bytes, path, root: bytes) -> bool:
    current = leaf
    for step in path:
        if step.sibling_on_left:
            current = node_hash(step.sibling, current)
        else:
            current = node_hash(current, step.sibling)
    return current == root
