"""AES-128 block cipher built from first principles.

No crypto libraries: GF(2^8) arithmetic, a computed S-box, Rijndael key
expansion, the four round transforms and their inverses, and single-block
encrypt/decrypt. A numpy-vectorised ECB path exists purely for throughput
measurement; the scalar implementation is the authoritative one.

The 16-byte block is viewed as the usual 4x4 column-major state: input
byte i sits at row (i % 4), column (i // 4), i.e. a flat list in input
order is already column-major.
"""

from dataclasses import dataclass
from typing import List, Sequence

import numpy as np

BLOCK_SIZE = 16
KEY_SIZE = 16
NUM_ROUNDS = 10

# GF(2^8) reduction polynomial x^8 + x^4 + x^3 + x + 1
_POLY = 0x11B


def xtime(a: int) -> int:
    """Multiply by x (0x02) in GF(2^8)."""
    a <<= 1
    if a & 0x100:
        a ^= _POLY
    return a & 0xFF


def gf_mul(a: int, b: int) -> int:
    """Multiply two field elements, shift-and-reduce."""
    result = 0
    while b:
        if b & 1:
            result ^= a
        a = xtime(a)
        b >>= 1
    return result


def _gf_inv(a: int) -> int:
    # a^254 = a^-1 in GF(2^8); square-and-multiply keeps this independent
    # of any table.
    if a == 0:
        return 0
    result = 1
    power = a
    exp = 254
    while exp:
        if exp & 1:
            result = gf_mul(result, power)
        power = gf_mul(power, power)
        exp >>= 1
    return result


def _build_sbox() -> List[int]:
    box = []
    for a in range(256):
        x = _gf_inv(a)
        # standard affine transform over GF(2)
        y = 0
        for bit in range(8):
            b = (
                (x >> bit)
                ^ (x >> ((bit + 4) % 8))
                ^ (x >> ((bit + 5) % 8))
                ^ (x >> ((bit + 6) % 8))
                ^ (x >> ((bit + 7) % 8))
                ^ (0x63 >> bit)
            ) & 1
            y |= b << bit
        box.append(y)
    return box


SBOX = _build_sbox()
INV_SBOX = [0] * 256
for _i, _v in enumerate(SBOX):
    INV_SBOX[_v] = _i

# spot-check against published values; catches transcription/derivation bugs
if SBOX[0x00] != 0x63 or SBOX[0x53] != 0xED:
    raise AssertionError("S-box self-check failed")
if sorted(SBOX) != list(range(256)):
    raise AssertionError("S-box is not a permutation")

# multiplication tables for the MixColumns coefficients
MUL2 = [gf_mul(x, 0x02) for x in range(256)]
MUL3 = [gf_mul(x, 0x03) for x in range(256)]
MUL9 = [gf_mul(x, 0x09) for x in range(256)]
MUL11 = [gf_mul(x, 0x0B) for x in range(256)]
MUL13 = [gf_mul(x, 0x0D) for x in range(256)]
MUL14 = [gf_mul(x, 0x0E) for x in range(256)]

RCON = [0x01, 0x02, 0x04, 0x08, 0x10, 0x20, 0x40, 0x80, 0x1B, 0x36]

State = List[int]  # 16 bytes, column-major


def state_from_block(block: bytes) -> State:
    if len(block) != BLOCK_SIZE:
        raise ValueError(f"block must be {BLOCK_SIZE} bytes, got {len(block)}")
    return list(block)


def block_from_state(state: Sequence[int]) -> bytes:
    return bytes(state)


def sub_bytes(state: Sequence[int]) -> State:
    return [SBOX[b] for b in state]


def inv_sub_bytes(state: Sequence[int]) -> State:
    return [INV_SBOX[b] for b in state]


def shift_rows(state: Sequence[int]) -> State:
    # row r rotates left by r; flat index 4*c + r
    out = [0] * 16
    for r in range(4):
        for c in range(4):
            out[4 * c + r] = state[4 * ((c + r) % 4) + r]
    return out


def inv_shift_rows(state: Sequence[int]) -> State:
    out = [0] * 16
    for r in range(4):
        for c in range(4):
            out[4 * ((c + r) % 4) + r] = state[4 * c + r]
    return out


def mix_columns(state: Sequence[int]) -> State:
    out = [0] * 16
    for c in range(4):
        i = 4 * c
        a0, a1, a2, a3 = state[i], state[i + 1], state[i + 2], state[i + 3]
        out[i] = MUL2[a0] ^ MUL3[a1] ^ a2 ^ a3
        out[i + 1] = a0 ^ MUL2[a1] ^ MUL3[a2] ^ a3
        out[i + 2] = a0 ^ a1 ^ MUL2[a2] ^ MUL3[a3]
        out[i + 3] = MUL3[a0] ^ a1 ^ a2 ^ MUL2[a3]
    return out


def inv_mix_columns(state: Sequence[int]) -> State:
    out = [0] * 16
    for c in range(4):
        i = 4 * c
        a0, a1, a2, a3 = state[i], state[i + 1], state[i + 2], state[i + 3]
        out[i] = MUL14[a0] ^ MUL11[a1] ^ MUL13[a2] ^ MUL9[a3]
        out[i + 1] = MUL9[a0] ^ MUL14[a1] ^ MUL11[a2] ^ MUL13[a3]
        out[i + 2] = MUL13[a0] ^ MUL9[a1] ^ MUL14[a2] ^ MUL11[a3]
        out[i + 3] = MUL11[a0] ^ MUL13[a1] ^ MUL9[a2] ^ MUL14[a3]
    return out


def add_round_key(state: Sequence[int], round_key: bytes) -> State:
    if len(round_key) != BLOCK_SIZE:
        raise ValueError("round key must be 16 bytes")
    return [b ^ k for b, k in zip(state, round_key)]


@dataclass(frozen=True)
class KeySchedule:
    """The 11 expanded round keys for AES-128 (176 bytes total)."""

    round_keys: tuple  # 11 x bytes(16)
    rounds: int = NUM_ROUNDS

    def __post_init__(self):
        if len(self.round_keys) != self.rounds + 1:
            raise ValueError("schedule must hold rounds+1 round keys")


def expand_key(key: bytes) -> KeySchedule:
    """Rijndael key expansion: 16-byte key -> 44 words -> 11 round keys."""
    if len(key) != KEY_SIZE:
        raise ValueError(f"key must be {KEY_SIZE} bytes, got {len(key)}")
    words = [list(key[4 * i : 4 * i + 4]) for i in range(4)]
    for i in range(4, 44):
        t = list(words[i - 1])
        if i % 4 == 0:
            t = t[1:] + t[:1]  # RotWord
            t = [SBOX[b] for b in t]  # SubWord
            t[0] ^= RCON[i // 4 - 1]
        words.append([a ^ b for a, b in zip(words[i - 4], t)])
    round_keys = tuple(
        bytes(b for w in words[4 * r : 4 * r + 4] for b in w) for r in range(11)
    )
    return KeySchedule(round_keys)


def encrypt_block(block: bytes, schedule: KeySchedule) -> bytes:
    """Encrypt one 16-byte block: initial key add, 9 full rounds, final
    round without MixColumns."""
    s = state_from_block(block)
    s = add_round_key(s, schedule.round_keys[0])
    for r in range(1, NUM_ROUNDS):
        s = sub_bytes(s)
        s = shift_rows(s)
        s = mix_columns(s)
        s = add_round_key(s, schedule.round_keys[r])
    s = sub_bytes(s)
    s = shift_rows(s)
    s = add_round_key(s, schedule.round_keys[NUM_ROUNDS])
    return block_from_state(s)


def decrypt_block(block: bytes, schedule: KeySchedule) -> bytes:
    """Exact inverse of encrypt_block; round keys applied in reverse."""
    s = state_from_block(block)
    s = add_round_key(s, schedule.round_keys[NUM_ROUNDS])
    s = inv_shift_rows(s)
    s = inv_sub_bytes(s)
    for r in range(NUM_ROUNDS - 1, 0, -1):
        s = add_round_key(s, schedule.round_keys[r])
        s = inv_mix_columns(s)
        s = inv_shift_rows(s)
        s = inv_sub_bytes(s)
    s = add_round_key(s, schedule.round_keys[0])
    return block_from_state(s)


# flat index i = 4*c + r; shift_rows moves old index 4*((c+r)%4)+r there
_SHIFT_ROWS_PERM = np.array(
    [4 * (((i // 4) + (i % 4)) % 4) + (i % 4) for i in range(16)], dtype=np.intp
)
_XTIME_TABLE = np.array([xtime(x) for x in range(256)], dtype=np.uint8)


def encrypt_ecb(data: bytes, schedule: KeySchedule) -> bytes:
    """Encrypt a block-aligned buffer in ECB, vectorised across blocks.

    Used by the throughput self-test; bit-identical to mapping
    encrypt_block over each block (asserted in tests).
    """
    if len(data) % BLOCK_SIZE != 0:
        raise ValueError("data length must be a multiple of 16")
    n = len(data) // BLOCK_SIZE
    sbox = np.array(SBOX, dtype=np.uint8)
    rks = [np.frombuffer(rk, dtype=np.uint8) for rk in schedule.round_keys]
    s = np.frombuffer(data, dtype=np.uint8).reshape(n, BLOCK_SIZE) ^ rks[0]
    for r in range(1, NUM_ROUNDS):
        s = sbox[s][:, _SHIFT_ROWS_PERM]
        cols = s.reshape(n, 4, 4)
        t = cols[:, :, 0] ^ cols[:, :, 1] ^ cols[:, :, 2] ^ cols[:, :, 3]
        mixed = np.empty_like(cols)
        for i in range(4):
            mixed[:, :, i] = (
                cols[:, :, i]
                ^ t
                ^ _XTIME_TABLE[cols[:, :, i] ^ cols[:, :, (i + 1) % 4]]
            )
        s = mixed.reshape(n, BLOCK_SIZE) ^ rks[r]
    s = sbox[s][:, _SHIFT_ROWS_PERM] ^ rks[NUM_ROUNDS]
    return s.tobytes()
