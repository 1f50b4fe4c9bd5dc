"""Random binning (Wyner) wiretap codes with exact leakage accounting.

A code is a table of 2^secret_bits bins times 2^random_bits codewords per
bin, drawn i.i.d. from the input distribution. The secret selects the bin,
local randomness selects the codeword inside it. Leakage I(secret; Z^N) is
computed exactly by enumerating the eavesdropper's output space; decoding
error is estimated by Monte Carlo over the main channel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channels import ChannelTriple, TransitionMatrix, sample
from .errors import BudgetError, ValidationError
from .info_measures import check_prob_vector, _entropy_raw, mutual_information, secrecy_capacity
from .bounds import BoundParams, theorem2_bound
from .parsing import lz_complexity, prefix_phrase_counts
from .rand import as_rng, inverse_cdf_sample, substream
from .sequences import Alphabet, SymbolSequence

ENUMERATION_BUDGET = 2 ** 24
# finite stand-in for log 0 so impossible codewords compare exactly
LOG_FLOOR = -1e18


@dataclass(frozen=True, eq=False)
class WynerCode:
    """Binned random codebook of shape (2^secret_bits, 2^random_bits, N)."""

    block_len: int
    secret_bits: int
    random_bits: int
    codebook: np.ndarray
    input_dist: np.ndarray
    seed: int

    @property
    def in_size(self) -> int:
        return int(self.input_dist.size)

    @property
    def bins(self) -> int:
        return 2 ** self.secret_bits

    @property
    def words_per_bin(self) -> int:
        return 2 ** self.random_bits


def build_code(block_len: int, secret_bits: int, random_bits: int, input_dist, seed: int) -> WynerCode:
    """Draw a codebook i.i.d. from input_dist; deterministic given the seed."""
    if block_len < 1:
        raise ValidationError(f"block length must be >= 1, got {block_len}")
    if secret_bits < 1:
        raise ValidationError(f"secret_bits must be >= 1, got {secret_bits}")
    if random_bits < 0:
        raise ValidationError(f"random_bits must be >= 0, got {random_bits}")
    p = check_prob_vector(input_dist)
    if secret_bits + random_bits > block_len * math.log2(p.size) + 1e-12:
        raise ValidationError(
            f"rate overflow: {secret_bits} + {random_bits} bits exceed "
            f"{block_len} symbols over an alphabet of {p.size}"
        )
    total_words = (2 ** secret_bits) * (2 ** random_bits)
    if total_words * block_len > ENUMERATION_BUDGET:
        raise BudgetError(f"codebook of {total_words} x {block_len} symbols exceeds budget")
    rng = as_rng(seed)
    draws = rng.random((total_words, block_len))
    cum = np.cumsum(p)
    flat = inverse_cdf_sample(cum, draws.ravel()).reshape(total_words, block_len)
    codebook = flat.reshape(2 ** secret_bits, 2 ** random_bits, block_len)
    codebook.setflags(write=False)
    return WynerCode(
        block_len=block_len,
        secret_bits=secret_bits,
        random_bits=random_bits,
        codebook=codebook,
        input_dist=p,
        seed=int(seed),
    )


def wyner_encode(code: WynerCode, secret: int, inner: int) -> SymbolSequence:
    """Look up the codeword for (secret bin, inner randomness)."""
    if not 0 <= secret < code.bins:
        raise ValidationError(f"secret index {secret} outside [0, {code.bins})")
    if not 0 <= inner < code.words_per_bin:
        raise ValidationError(f"inner index {inner} outside [0, {code.words_per_bin})")
    return SymbolSequence(Alphabet(code.in_size), tuple(int(v) for v in code.codebook[secret, inner]))


def ml_decode(code: WynerCode, y: SymbolSequence, ch: TransitionMatrix) -> tuple:
    """Maximum-likelihood codeword over the given channel; returns (secret, inner).

    Log-likelihoods are computed as integer (input, output) pair counts dotted
    with the log-channel in a fixed order, so codewords inducing the same pair
    multiset get bitwise-equal scores and ties resolve lexicographically by
    (secret, inner).
    """
    if ch.in_alphabet.size != code.in_size:
        raise ValidationError(
            f"channel input {ch.in_alphabet.size} does not match code alphabet {code.in_size}"
        )
    if len(y) != code.block_len:
        raise ValidationError(f"received word length {len(y)}, expected {code.block_len}")
    if y.alphabet.size != ch.out_alphabet.size:
        raise ValidationError(
            f"received alphabet {y.alphabet.size} does not match channel output "
            f"{ch.out_alphabet.size}"
        )
    out_size = ch.out_alphabet.size
    flat_cw = code.codebook.reshape(-1, code.block_len)
    pair = flat_cw * out_size + y.array()[None, :]
    counts = np.zeros((flat_cw.shape[0], code.in_size * out_size), dtype=np.int64)
    np.add.at(counts, (np.repeat(np.arange(flat_cw.shape[0]), code.block_len), pair.ravel()), 1)
    with np.errstate(divide="ignore"):
        logch = np.log2(ch.rows).ravel()
    logch = np.where(np.isfinite(logch), logch, LOG_FLOOR)
    scores = counts @ logch
    best = int(np.argmax(scores))
    return divmod(best, code.words_per_bin)


def _codeword_output_laws(codebook_flat: np.ndarray, rows: np.ndarray, block_len: int) -> np.ndarray:
    z_size = rows.shape[1]
    total = codebook_flat.shape[0] * (z_size ** block_len)
    if total > ENUMERATION_BUDGET:
        raise BudgetError(f"output-law enumeration needs {total} entries, budget {ENUMERATION_BUDGET}")
    laws = np.ones((codebook_flat.shape[0], 1))
    for i in range(block_len):
        laws = (laws[:, :, None] * rows[codebook_flat[:, i]][:, None, :]).reshape(
            codebook_flat.shape[0], -1
        )
    return laws


def code_leakage(code: WynerCode, eaves_channel: TransitionMatrix) -> float:
    """Exact I(secret; Z^N) in bits, uniform secret and inner randomness."""
    if eaves_channel.in_alphabet.size != code.in_size:
        raise ValidationError(
            f"channel input {eaves_channel.in_alphabet.size} does not match code alphabet "
            f"{code.in_size}"
        )
    flat = code.codebook.reshape(-1, code.block_len)
    laws = _codeword_output_laws(flat, eaves_channel.rows, code.block_len)
    per_bin = laws.reshape(code.bins, code.words_per_bin, -1).mean(axis=1)
    marginal = per_bin.mean(axis=0)
    h_cond = sum(_entropy_raw(row) for row in per_bin) / code.bins
    return max(_entropy_raw(marginal) - h_cond, 0.0)


@dataclass(frozen=True)
class DecodeErrorEstimate:
    trials: int
    secret_errors: int
    word_errors: int

    @property
    def secret_error_rate(self) -> float:
        return self.secret_errors / self.trials

    @property
    def word_error_rate(self) -> float:
        return self.word_errors / self.trials


def monte_carlo_error(code: WynerCode, ch: TransitionMatrix, trials: int, seed: int) -> DecodeErrorEstimate:
    """Estimate ML decoding error over the channel, uniform (secret, inner).

    Trials are substream-seeded by (seed, trial index).
    """
    if trials < 1:
        raise ValidationError(f"trials must be >= 1, got {trials}")
    secret_errs = word_errs = 0
    for t in range(trials):
        rng = substream(seed, t)
        secret = int(rng.integers(code.bins))
        inner = int(rng.integers(code.words_per_bin))
        x = wyner_encode(code, secret, inner)
        y = sample(ch, x, rng)
        s_hat, i_hat = ml_decode(code, y, ch)
        if s_hat != secret:
            secret_errs += 1
        if (s_hat, i_hat) != (secret, inner):
            word_errs += 1
    return DecodeErrorEstimate(trials=trials, secret_errors=secret_errs, word_errors=word_errs)


@dataclass(frozen=True)
class AuditReport:
    """Randomness accounting against the Theorem-2 necessity line.

    j_per_chunk is the code's local randomness per chunk of m channel
    symbols; bound is m I(X*;Z*) - k eps_s - log2(q_e)/ell at the
    secrecy-capacity-achieving input. passed means the code spends at least
    the provably necessary randomness.
    """

    j_per_chunk: float
    bound: float
    margin: float
    i_xz_star: float
    ell: int
    passed: bool


def randomness_audit(code: WynerCode, triple: ChannelTriple, params: BoundParams, ell: int) -> AuditReport:
    """Compare the code's random_bits per chunk with the Theorem-2 bound."""
    if not isinstance(ell, int) or ell < 1:
        raise ValidationError(f"ell must be a positive integer, got {ell!r}")
    if code.block_len != params.m * ell:
        raise ValidationError(
            f"block length {code.block_len} is not m * ell = {params.m} * {ell}"
        )
    if code.in_size != triple.main.in_alphabet.size:
        raise ValidationError("code alphabet does not match the channel input alphabet")
    cs = secrecy_capacity(triple, tol=1e-10)
    i_xz = mutual_information(cs.argmax, triple.cascade)
    bound = theorem2_bound(params, ell, i_xz)
    j_per_chunk = code.random_bits / ell
    return AuditReport(
        j_per_chunk=j_per_chunk,
        bound=bound,
        margin=j_per_chunk - bound,
        i_xz_star=i_xz,
        ell=ell,
        passed=j_per_chunk >= bound,
    )


def separation_plan(
    u: SymbolSequence,
    triple: ChannelTriple,
    delta: float,
    mode: str,
    block_len: int | None = None,
) -> dict:
    """Source/channel separation accounting: LZ compress, then Wyner-code.

    No bitstream is emitted; the plan reports lengths. The payload is
    ceil(n rho_LZ) bits and the auxiliary header carries the payload length in
    ceil(log2(n log2 alpha)) bits. mode 'fixed' maps the whole sequence to
    the number of channel uses N = ceil(bits / (C_s (1 - delta))); mode 'vtf'
    fixes N and consumes the longest prefix whose compressed size fits.
    """
    if not 0.0 <= delta < 1.0:
        raise ValidationError(f"delta must lie in [0, 1), got {delta}")
    if mode not in ("fixed", "vtf"):
        raise ValidationError(f"mode must be 'fixed' or 'vtf', got {mode!r}")
    n = len(u)
    alpha = u.alphabet.size
    if alpha < 2:
        raise ValidationError("separation needs a source alphabet of size >= 2")
    cs = secrecy_capacity(triple, tol=1e-10)
    if cs.value <= 0.0:
        raise ValidationError(f"secrecy capacity {cs.value} is not positive")
    effective = cs.value * (1.0 - delta)
    aux_bits = math.ceil(math.log2(n * math.log2(alpha)))
    plan = {
        "mode": mode,
        "n": n,
        "delta": delta,
        "c_s": cs.value,
        "aux_bits": aux_bits,
    }
    if mode == "fixed":
        rho = lz_complexity(u)
        payload = math.ceil(n * rho)
        uses = math.ceil(payload / effective)
        plan.update(
            rho=rho,
            payload_bits=payload,
            channel_uses=uses,
            channel_uses_with_header=math.ceil((payload + aux_bits) / effective),
            lam=uses / n,
        )
        return plan
    if block_len is None or block_len < 1:
        raise ValidationError("mode 'vtf' needs a positive block_len")
    budget_bits = block_len * effective
    counts = prefix_phrase_counts(u)
    n_prefix = 0
    for i, c in enumerate(counts, start=1):
        if math.ceil(c * math.log2(c)) <= budget_bits:
            n_prefix = i
    if n_prefix == 0:
        raise ValidationError(
            f"block length {block_len} cannot carry even one source symbol at delta {delta}"
        )
    c_pref = counts[n_prefix - 1]
    plan.update(
        block_len=block_len,
        budget_bits=budget_bits,
        consumed=n_prefix,
        payload_bits=int(math.ceil(c_pref * math.log2(c_pref))),
        rho=c_pref * math.log2(c_pref) / n_prefix,
        lam=block_len / n_prefix,
    )
    return plan
