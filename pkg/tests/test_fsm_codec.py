import itertools
import math

import numpy as np
import pytest

from secwire.channels import ChannelTriple, bsc, channel_from_rows, identity_channel
from secwire.errors import BudgetError, ValidationError
from secwire.fsm_codec import (
    DecoderSpec,
    SideInfoDecoderSpec,
    SideInfoEncoderSpec,
    StochasticEncoderSpec,
    block_to_index,
    conditional_leakage,
    decode_stream,
    dump_fsm,
    encode_stream,
    index_to_block,
    induced_security_channel,
    load_fsm,
    max_conditional_leakage,
    max_mi_security,
    simulate_system,
    sweep_initial_states,
)
from secwire.info_measures import channel_capacity
from secwire.sequences import Alphabet, SymbolSequence, sequence_from_array


def _identity_encoder():
    return StochasticEncoderSpec(
        k=1,
        m=1,
        in_size=2,
        out_size=2,
        n_states=1,
        emit={(0, 0): [(0, 1.0)], (0, 1): [(1, 1.0)]},
        next_state=np.zeros((1, 2, 1), dtype=int),
    )


def _identity_decoder():
    table = np.arange(2).reshape(1, 2, 1)
    return DecoderSpec(
        k=1,
        m=1,
        in_size=2,
        out_size=2,
        n_states=1,
        out_table=table,
        next_state=np.zeros((1, 2, 1), dtype=int),
    )


def _xor_state_encoder():
    # state flips every chunk; emission is u XOR state
    emit = {}
    for s in range(2):
        for u in range(2):
            emit[(s, u)] = [(u ^ s, 1.0)]
    nxt = np.zeros((2, 2, 1), dtype=int)
    nxt[0, :, 0] = 1
    nxt[1, :, 0] = 0
    return StochasticEncoderSpec(
        k=1, m=1, in_size=2, out_size=2, n_states=2, emit=emit, next_state=nxt
    )


def _random_encoder(rng, n_states=2, side_size=1, ignore_side=True):
    emit = {}
    for s in range(n_states):
        for u in range(2):
            base = rng.random(2) + 0.05
            base /= base.sum()
            for w in range(side_size):
                p = base if ignore_side else np.roll(base, w)
                emit[(s, u, w)] = [(0, float(p[0])), (1, float(p[1]))]
    nxt = rng.integers(0, n_states, (n_states, 2, side_size))
    if ignore_side:
        nxt = np.repeat(nxt[:, :, :1], side_size, axis=2)
    return StochasticEncoderSpec(
        k=1,
        m=1,
        in_size=2,
        out_size=2,
        n_states=n_states,
        emit=emit,
        next_state=nxt,
        side_size=side_size,
    )


def _brute_force_induced(enc, triple, n):
    # per-u walk accumulating the z-block law with plain dict arithmetic
    casc = triple.cascade.rows
    z_size = casc.shape[1]
    rows = []
    for u in itertools.product(range(enc.in_size), repeat=n):
        law = {(): 1.0}
        s = enc.initial_state
        for sym in u:
            new = {}
            for zseq, p in law.items():
                for x, px in enc.emit[(s, sym, 0)]:
                    for z in range(z_size):
                        q = p * px * casc[x, z]
                        if q:
                            new[zseq + (z,)] = new.get(zseq + (z,), 0.0) + q
            law = new
            s = int(enc.next_state[s, sym, 0])
        row = np.zeros(z_size ** n)
        for zseq, p in law.items():
            row[block_to_index(zseq, z_size)] = p
        rows.append(row)
    return np.array(rows)


def test_block_index_round_trip():
    rng = np.random.default_rng(3)
    for _ in range(50):
        base = int(rng.integers(2, 5))
        length = int(rng.integers(1, 6))
        block = tuple(int(v) for v in rng.integers(0, base, length))
        assert index_to_block(block_to_index(block, base), base, length) == block
    with pytest.raises(ValidationError):
        block_to_index((0, 2), 2)


def test_spec_validation():
    with pytest.raises(ValidationError):
        StochasticEncoderSpec(
            k=1, m=1, in_size=2, out_size=2, n_states=1,
            emit={(0, 0): [(0, 1.0)]},  # (0, 1) missing
            next_state=np.zeros((1, 2, 1), dtype=int),
        )
    with pytest.raises(ValidationError):
        StochasticEncoderSpec(
            k=1, m=1, in_size=2, out_size=2, n_states=1,
            emit={(0, 0): [(0, 0.6)], (0, 1): [(1, 1.0)]},
            next_state=np.zeros((1, 2, 1), dtype=int),
        )
    with pytest.raises(ValidationError):
        SideInfoEncoderSpec(
            k=1, m=1, in_size=2, out_size=2, n_states=1,
            emit={(0, 0): [(0, 1.0)], (0, 1): [(1, 1.0)]},
            next_state=np.zeros((1, 2, 1), dtype=int),
            side_size=1,
        )
    with pytest.raises(ValidationError):
        DecoderSpec(
            k=1, m=1, in_size=2, out_size=2, n_states=1,
            out_table=np.array([[[0], [2]]]),  # entry out of range
            next_state=np.zeros((1, 2, 1), dtype=int),
        )


def test_encode_stream_deterministic_given_seed():
    rng = np.random.default_rng(77)
    enc = _random_encoder(rng)
    u = sequence_from_array(rng.integers(0, 2, 40), 2)
    x1, s1 = encode_stream(enc, u, 123)
    x2, s2 = encode_stream(enc, u, 123)
    assert x1.data == x2.data and s1 == s2
    assert len(s1) == len(u) + 1
    assert s1[0] == enc.initial_state


def test_state_trajectory_is_input_driven():
    enc = _xor_state_encoder()
    u = sequence_from_array([0, 1, 1, 0, 1], 2)
    _, states = encode_stream(enc, u, 5)
    assert states == (0, 1, 0, 1, 0, 1)


def test_decode_stream_table_walk():
    dec = _identity_decoder()
    y = sequence_from_array([1, 0, 1], 2)
    v, states = decode_stream(dec, y)
    assert v.data == (1, 0, 1)
    assert states == (0, 0, 0, 0)


def test_stream_length_validation():
    enc = StochasticEncoderSpec(
        k=2, m=1, in_size=2, out_size=2, n_states=1,
        emit={(0, i): [(i % 2, 1.0)] for i in range(4)},
        next_state=np.zeros((1, 4, 1), dtype=int),
    )
    with pytest.raises(ValidationError):
        encode_stream(enc, sequence_from_array([0, 1, 0], 2), 1)
    with pytest.raises(ValidationError):
        decode_stream(_identity_decoder(), SymbolSequence(Alphabet(3), (0, 1)))


def test_simulate_identity_system_is_error_free():
    triple = ChannelTriple(identity_channel(2), identity_channel(2))
    u = sequence_from_array([0, 1, 1, 0, 1, 0], 2)
    stats = simulate_system(_identity_encoder(), _identity_decoder(), triple, u, trials=50, seed=4)
    assert stats.bit_error_rate == 0.0
    assert stats.worst_chunk_error == 0.0
    assert stats.chunk_count == 6


def test_simulate_joint_frequencies_sum_to_one():
    triple = ChannelTriple(bsc(0.1), bsc(0.2))
    u = sequence_from_array([0, 1, 0, 1], 2)
    stats = simulate_system(
        _xor_state_encoder(), _identity_decoder(), triple, u, trials=200, seed=9, collect_joint=True
    )
    total = sum(stats.empirical_joint.values())
    assert math.isclose(total, 1.0)
    for key in stats.empirical_joint:
        assert len(key) == 7


def test_simulate_deterministic_and_seed_sensitive():
    triple = ChannelTriple(bsc(0.1), bsc(0.2))
    u = sequence_from_array([0, 1, 0, 1, 1, 0], 2)
    enc = _xor_state_encoder()
    dec = _identity_decoder()
    a = simulate_system(enc, dec, triple, u, trials=100, seed=1)
    b = simulate_system(enc, dec, triple, u, trials=100, seed=1)
    c = simulate_system(enc, dec, triple, u, trials=100, seed=2)
    assert a.per_chunk_error == b.per_chunk_error
    assert a.per_chunk_error != c.per_chunk_error


def test_sweep_initial_states_covers_all_pairs():
    triple = ChannelTriple(bsc(0.05), bsc(0.05))
    u = sequence_from_array([0, 1, 1, 0], 2)
    out = sweep_initial_states(_xor_state_encoder(), _identity_decoder(), triple, u, trials=20, seed=3)
    assert set(out) == {(0, 0), (1, 0)}
    for stats in out.values():
        assert stats.trials == 20


def test_induced_channel_memoryless_is_kron_power():
    rng = np.random.default_rng(21)
    enc = _random_encoder(rng, n_states=1)
    triple = ChannelTriple(bsc(0.1), bsc(0.15))
    got = induced_security_channel(enc, triple, 3)
    g = np.zeros((2, 2))
    for u in range(2):
        for x, p in enc.emit[(0, u, 0)]:
            g[u] += p * triple.cascade.rows[x]
    expected = np.kron(np.kron(g, g), g)
    assert np.allclose(got.rows, expected, atol=1e-15)


def test_induced_channel_matches_brute_force_walk():
    rng = np.random.default_rng(34)
    for trial in range(5):
        enc = _random_encoder(rng, n_states=int(rng.integers(1, 4)))
        triple = ChannelTriple(bsc(float(rng.random() * 0.3)), bsc(float(rng.random() * 0.3)))
        got = induced_security_channel(enc, triple, 4)
        expected = _brute_force_induced(enc, triple, 4)
        assert np.allclose(got.rows, expected, atol=1e-12)


def test_induced_channel_budget_guard():
    enc = _identity_encoder()
    triple = ChannelTriple(bsc(0.1), bsc(0.1))
    with pytest.raises(BudgetError):
        induced_security_channel(enc, triple, 14)


def test_max_mi_security_passthrough_is_product_capacity():
    triple = ChannelTriple(bsc(0.1), bsc(0.15))
    res = max_mi_security(_identity_encoder(), triple, 3, tol=1e-11)
    single = channel_capacity(triple.cascade, tol=1e-12).value
    assert math.isclose(res.value, 3 * single, abs_tol=1e-7)


def test_conditional_leakage_identity_leak_equals_w():
    rng = np.random.default_rng(50)
    enc = _random_encoder(rng, n_states=2, side_size=2, ignore_side=True)
    triple = ChannelTriple(bsc(0.1), bsc(0.2))
    mu = rng.random((4, 4)) + 0.01
    mu /= mu.sum()
    rep = conditional_leakage(enc, triple, None, 2, mu)
    assert math.isclose(rep.i_uz_given_wdot, rep.i_uz_given_w, abs_tol=1e-12)
    assert rep.log2_qe == 1.0
    assert rep.sandwich_slack >= -1e-12


def test_conditional_leakage_constant_leak_drops_conditioning():
    rng = np.random.default_rng(51)
    enc = _random_encoder(rng, n_states=1, side_size=2, ignore_side=True)
    triple = ChannelTriple(bsc(0.1), bsc(0.2))
    mu = rng.random((4, 4)) + 0.01
    mu /= mu.sum()
    leak = channel_from_rows([[1.0], [1.0]])
    rep = conditional_leakage(enc, triple, leak, 2, mu)
    assert math.isclose(rep.i_uz_given_wdot, rep.i_uz, abs_tol=1e-12)


def test_sandwich_fails_for_side_dependent_emission():
    # x = u XOR w with noiseless channels: I(U;Z|W) = 1, I(U;Z|Wdot) = 0
    emit = {}
    for u in range(2):
        for w in range(2):
            emit[(0, u, w)] = [(u ^ w, 1.0)]
    enc = StochasticEncoderSpec(
        k=1, m=1, in_size=2, out_size=2, n_states=1,
        emit=emit, next_state=np.zeros((1, 2, 2), dtype=int), side_size=2,
    )
    triple = ChannelTriple(identity_channel(2), identity_channel(2))
    mu = np.full((2, 2), 0.25)
    leak = channel_from_rows([[1.0], [1.0]])
    rep = conditional_leakage(enc, triple, leak, 1, mu)
    assert math.isclose(rep.i_uz_given_w, 1.0, abs_tol=1e-12)
    assert math.isclose(rep.i_uz_given_wdot, 0.0, abs_tol=1e-12)
    assert math.isclose(rep.sandwich_slack, -1.0, abs_tol=1e-12)


def test_max_conditional_leakage_dominates_uniform():
    rng = np.random.default_rng(52)
    enc = _random_encoder(rng, n_states=1, side_size=2, ignore_side=True)
    triple = ChannelTriple(bsc(0.05), bsc(0.25))
    best, mu = max_conditional_leakage(enc, triple, None, 1, grid_step=0.25)
    uniform = conditional_leakage(enc, triple, None, 1, np.full((2, 2), 0.25))
    assert best.i_uz_given_wdot >= uniform.i_uz_given_wdot - 1e-12
    assert mu.shape == (2, 2)
    with pytest.raises(BudgetError):
        max_conditional_leakage(enc, triple, None, 3, grid_step=0.02)


def test_fsm_file_round_trip(tmp_path):
    rng = np.random.default_rng(60)
    enc = _random_encoder(rng, n_states=3, side_size=2, ignore_side=False)
    path = tmp_path / "enc.fsm"
    dump_fsm(enc, path)
    back = load_fsm(path)
    assert isinstance(back, SideInfoEncoderSpec)
    assert back.emit == enc.emit
    assert np.array_equal(back.next_state, enc.next_state)
    dec = _identity_decoder()
    dpath = tmp_path / "dec.fsm"
    dump_fsm(dec, dpath)
    dback = load_fsm(dpath)
    assert isinstance(dback, DecoderSpec)
    assert np.array_equal(dback.out_table, dec.out_table)


def test_fsm_wildcards_first_match_wins(tmp_path):
    path = tmp_path / "dec.fsm"
    path.write_text(
        "decoder\nk 1\nm 1\ngamma 2\nalpha 2\nstates 2\ninit 0\n"
        "out 0 1 1\nout * * 0\n"
        "next 0 * 1\nnext 1 * 0\n"
    )
    dec = load_fsm(path)
    assert dec.out_table[0, 1, 0] == 1
    assert dec.out_table[0, 0, 0] == 0
    assert dec.out_table[1, 1, 0] == 0
    assert dec.next_state[0, 0, 0] == 1


def test_fsm_load_errors(tmp_path):
    cases = {
        "header": "bogus\nk 1\n",
        "missing": "encoder\nk 1\nm 1\nalpha 2\nbeta 2\nstates 1\n",
        "coverage": (
            "encoder\nk 1\nm 1\nalpha 2\nbeta 2\nstates 1\ninit 0\n"
            "emit 0 0 0 1.0\nemit 0 1 1 1.0\nnext 0 0 0\n"
        ),
        "prob": (
            "encoder\nk 1\nm 1\nalpha 2\nbeta 2\nstates 1\ninit 0\n"
            "emit 0 0 0 0.7\nemit 0 1 1 1.0\nnext 0 * 0\n"
        ),
        "directive": "encoder\nk 1\nzap 2\n",
        "symbol": (
            "encoder\nk 1\nm 1\nalpha 2\nbeta 2\nstates 1\ninit 0\n"
            "emit 0 2 0 1.0\nnext 0 * 0\n"
        ),
    }
    for name, text in cases.items():
        path = tmp_path / f"{name}.fsm"
        path.write_text(text)
        with pytest.raises(ValidationError) as err:
            load_fsm(path)
        assert str(path) in str(err.value)


def test_fsm_comments_and_implicit_prob(tmp_path):
    path = tmp_path / "enc.fsm"
    path.write_text(
        "# passthrough\nencoder\nk 1\nm 1\nalpha 2\nbeta 2\n"
        "states 1\ninit 0\nemit 0 0 0  # prob omitted\nemit 0 1 1\nnext 0 * 0\n"
    )
    enc = load_fsm(path)
    assert enc.emit[(0, 0, 0)] == ((0, 1.0),)
