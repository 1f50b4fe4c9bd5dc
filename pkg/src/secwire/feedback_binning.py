"""Feedback transmission of an individual sequence by random binning.

The encoder hashes u^n to a bin index of L = ceil(n log2 alpha) bits and
feeds it to the decoder r bits at a time. After chunk i the decoder lists
every u' whose bin shares the received prefix, picks the one minimizing the
conditional LZ complexity given its side sequence w^n, and ACKs (through the
noiseless feedback link) once n rho_min <= i r - n delta. The true sequence
always survives the prefix filter when chunks arrive intact, so the session
ends by i* = ceil((n rho(u|w) + n delta) / r) and the compression ratio is at
most rho + delta + r/n.

Bin assignment is lazy: a keyed blake2b hash stands in for the shared random
binning table, so nothing of size alpha^n is ever materialized by the
encoder. The decoder's list step does enumerate alpha^n candidates and is
budget-guarded.
"""

from __future__ import annotations

import hashlib
import itertools
import math
from dataclasses import dataclass, field

from .channels import TransitionMatrix, sample
from .errors import BudgetError, ValidationError
from .parsing import conditional_lz_complexity
from .rand import substream
from .sequences import Alphabet, SymbolSequence
from .wyner_binning import WynerCode, ml_decode, wyner_encode

LIST_BUDGET = 2 ** 20  # max alpha^n scanned by the decoder
MAX_BIN_BITS = 512  # one blake2b digest


@dataclass(frozen=True)
class BinAssignment:
    """Keyed-hash bin assignment for sequences of length n over a fixed alphabet.

    bits_total is L = ceil(n log2 alpha); bin_bits returns the L-bit bin index
    as an integer, most significant chunk first.
    """

    n: int
    alphabet_size: int
    seed: int
    bits_total: int = field(init=False)

    def __post_init__(self):
        if self.n < 1:
            raise ValidationError(f"n must be >= 1, got {self.n}")
        if self.alphabet_size < 2:
            raise ValidationError(f"alphabet size must be >= 2, got {self.alphabet_size}")
        bits = math.ceil(self.n * math.log2(self.alphabet_size))
        if bits > MAX_BIN_BITS:
            raise ValidationError(f"bin index of {bits} bits exceeds the {MAX_BIN_BITS}-bit digest")
        if self.alphabet_size > 256:
            raise ValidationError("alphabet sizes above 256 are not supported by the hash layout")
        object.__setattr__(self, "bits_total", bits)

    def bin_bits(self, symbols) -> int:
        """L-bit bin index of the given length-n symbol tuple."""
        data = bytes(symbols)
        if len(data) != self.n:
            raise ValidationError(f"sequence length {len(data)}, expected {self.n}")
        key = int(self.seed).to_bytes(8, "big", signed=True)
        digest_len = (self.bits_total + 7) // 8
        digest = hashlib.blake2b(data, key=key, digest_size=digest_len).digest()
        return int.from_bytes(digest, "big") >> (8 * digest_len - self.bits_total)


def assign_bins(n: int, alphabet: Alphabet, seed: int) -> BinAssignment:
    return BinAssignment(n=n, alphabet_size=alphabet.size, seed=int(seed))


def list_decode_step(
    assign: BinAssignment,
    w: SymbolSequence,
    received_prefix: int,
    i: int,
    r: int,
    delta: float,
) -> tuple:
    """One decoder round: filter by bin prefix, rank by conditional complexity.

    received_prefix holds the first min(i*r, L) bin bits as an integer.
    Returns (ack, candidate); the candidate is released only on ACK and ties
    in complexity go to the lexicographically smallest sequence.
    """
    if i < 1 or r < 1:
        raise ValidationError(f"chunk index and size must be >= 1, got i={i}, r={r}")
    if delta < 0.0:
        raise ValidationError(f"delta must be nonnegative, got {delta}")
    n, alpha = assign.n, assign.alphabet_size
    if len(w) != n:
        raise ValidationError(f"side sequence length {len(w)}, expected {n}")
    if alpha ** n > LIST_BUDGET:
        raise BudgetError(f"list decoding scans {alpha ** n} sequences, budget {LIST_BUDGET}")
    plen = min(i * r, assign.bits_total)
    if not 0 <= received_prefix < (1 << max(plen, 1)):
        raise ValidationError(f"received prefix {received_prefix} does not fit in {plen} bits")
    shift = assign.bits_total - plen
    best_rho, best_u = None, None
    alphabet = Alphabet(alpha)
    for cand in itertools.product(range(alpha), repeat=n):
        if assign.bin_bits(cand) >> shift != received_prefix:
            continue
        rho = conditional_lz_complexity(SymbolSequence(alphabet, cand), w)
        if best_rho is None or rho < best_rho:
            best_rho, best_u = rho, cand
    if best_rho is None:
        return False, None
    if n * best_rho <= i * r - n * delta:
        return True, SymbolSequence(alphabet, best_u)
    return False, None


class IdealTransport:
    """Noiseless chunk delivery."""

    def send_chunk(self, bits: int, nbits: int) -> tuple:
        return bits, False


@dataclass(eq=False)
class CodedTransport:
    """Chunk delivery through a Wyner code over the main channel.

    Each r-bit chunk becomes the secret index of a fresh codeword; the inner
    randomness and the channel noise draw from substreams keyed by (seed,
    chunk counter), and the legitimate receiver ML-decodes its main-channel
    observation. A wrong secret surfaces as a chunk error in the transcript.
    """

    code: WynerCode
    main: TransitionMatrix
    seed: int
    chunks_sent: int = 0

    def send_chunk(self, bits: int, nbits: int) -> tuple:
        if nbits == 0:
            return 0, False
        if nbits > self.code.secret_bits:
            raise ValidationError(
                f"chunk of {nbits} bits exceeds the code's {self.code.secret_bits} secret bits"
            )
        rng = substream(self.seed, self.chunks_sent)
        self.chunks_sent += 1
        inner = int(rng.integers(self.code.words_per_bin))
        x = wyner_encode(self.code, bits, inner)
        y = sample(self.main, x, rng)
        s_hat, _ = ml_decode(self.code, y, self.main)
        return s_hat & ((1 << nbits) - 1), s_hat != bits


@dataclass(frozen=True, eq=False)
class SessionTranscript:
    """Outcome of one feedback session.

    chunks_sent is the round at which the decoder ACKed (or the cap if it
    never did); i_star is the guaranteed stopping round for intact chunks.
    compression_ratio counts full r-bit slots: chunks_sent * r / n.
    """

    r: int
    delta: float
    chunks_sent: int
    i_star: int
    reconstruction: SymbolSequence | None
    correct: bool
    compression_ratio: float
    chunk_error_count: int
    acked: bool


def run_session(
    u: SymbolSequence,
    w: SymbolSequence,
    r: int,
    delta: float,
    transport,
    seed: int,
) -> SessionTranscript:
    """Run the binning protocol once for (u, w) with the given chunk transport.

    The seed keys the bin assignment only; transports carry their own
    randomness. The round cap is the point where the threshold test accepts
    any nonempty list, a few rounds past L/r; transport corruption that
    empties the list beyond it ends the session unACKed.
    """
    if len(u) != len(w):
        raise ValidationError(f"length mismatch: |u| = {len(u)}, |w| = {len(w)}")
    if r < 1:
        raise ValidationError(f"chunk size must be >= 1, got {r}")
    if delta < 0.0:
        raise ValidationError(f"delta must be nonnegative, got {delta}")
    n = len(u)
    assign = assign_bins(n, u.alphabet, seed)
    bits_total = assign.bits_total
    b_true = assign.bin_bits(u.data)
    rho_true = conditional_lz_complexity(u, w)
    # same float ops as the ACK test so the stopping guarantee is exact
    i_star = 1
    while n * rho_true > i_star * r - n * delta:
        i_star += 1
    cap = max(i_star, math.ceil((bits_total + n * delta) / r) + 2)
    prefix = 0
    chunk_errors = 0
    reconstruction = None
    acked = False
    i = 0
    for i in range(1, cap + 1):
        lo = (i - 1) * r
        hi = min(i * r, bits_total)
        nbits = max(hi - lo, 0)
        sent = (b_true >> (bits_total - hi)) & ((1 << nbits) - 1) if nbits else 0
        received, errored = transport.send_chunk(sent, nbits)
        chunk_errors += bool(errored)
        prefix = (prefix << nbits) | received
        acked, candidate = list_decode_step(assign, w, prefix, i, r, delta)
        if acked:
            reconstruction = candidate
            break
    correct = reconstruction is not None and reconstruction.data == u.data
    return SessionTranscript(
        r=r,
        delta=delta,
        chunks_sent=i,
        i_star=i_star,
        reconstruction=reconstruction,
        correct=correct,
        compression_ratio=i * r / n,
        chunk_error_count=chunk_errors,
        acked=acked,
    )
