"""Layered encoding tests: parameters, placement grid, columns, ingestion."""

import json
from math import comb

import numpy as np
import pytest

from layeragg.client import (
    SchemeParams,
    encode_client,
    enumerate_layers,
    format_layer_grid,
    load_gradient,
    partition_gradient,
    random_gradient,
    reassemble_gradient,
)
from layeragg.errors import ConfigurationError
from layeragg.gf import GF
from layeragg.mds import decode_from, make_generator


@pytest.fixture(scope="module")
def gf8():
    return GF(8)


def test_derived_quantities():
    params = SchemeParams(p=120, n_e=7, n_h=6, s=2, nu=2)
    assert params.layers == comb(6, 4) == 15
    assert params.lam == 30
    assert params.d == 4
    assert params.p_padded == 120
    assert params.b == comb(5, 3) == 10
    assert params.alpha == comb(4, 2) == 6
    # counting identities
    assert params.lam * params.d == params.p_padded
    assert params.b * params.n_h == params.layers * (params.nu + params.s)


def test_padding_rounds_up():
    params = SchemeParams(p=100, n_e=2, n_h=4, s=1, nu=2)
    assert params.lam == 8
    assert params.d == 13
    assert params.p_padded == 104


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(p=0, n_e=1, n_h=4, s=1, nu=1),
        dict(p=8, n_e=0, n_h=4, s=1, nu=1),
        dict(p=8, n_e=1, n_h=1, s=1, nu=1),
        dict(p=8, n_e=1, n_h=4, s=0, nu=1),
        dict(p=8, n_e=1, n_h=4, s=4, nu=1),
        dict(p=8, n_e=1, n_h=4, s=1, nu=0),
        dict(p=8, n_e=1, n_h=4, s=1, nu=4),
    ],
)
def test_parameter_validation(kwargs):
    with pytest.raises(ConfigurationError):
        SchemeParams(**kwargs)


def test_layer_map_pairs_in_lexicographic_order():
    layers = enumerate_layers(4, 2)
    assert list(layers) == [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
    assert list(enumerate_layers(4, 4)) == [(0, 1, 2, 3)]
    assert enumerate_layers(6, 4)[0] == (0, 1, 2, 3)


def test_layer_map_column_counts():
    for n_h in (4, 5, 6):
        for k in range(1, n_h + 1):
            layers = enumerate_layers(n_h, k)
            b = comb(n_h - 1, k - 1)
            for j in range(n_h):
                assert len(layers.column_slots(j)) == b
    with pytest.raises(ConfigurationError):
        enumerate_layers(4, 5)


def test_layer_map_row_lookup():
    layers = enumerate_layers(4, 3)
    # helper 0 appears in layers 0,1,2 at rows 0,1,2 of its column
    assert layers.column_layers(0) == (0, 1, 2)
    assert layers.row_in_column(0, 1) == 1
    with pytest.raises(KeyError):
        layers.row_in_column(0, 3)  # layer 3 = (1,2,3) skips helper 0


def test_partition_round_trip_exact(gf8):
    params = SchemeParams(p=24, n_e=1, n_h=4, s=1, nu=2)  # lam=8, d=3
    g = np.arange(24, dtype=np.uint8)
    blocks = partition_gradient(g, params, gf8)
    assert blocks.shape == (4, 2, 3)
    assert np.array_equal(blocks.reshape(-1), g)
    assert np.array_equal(reassemble_gradient(blocks, params), g)


def test_partition_pads_with_zeros(gf8):
    params = SchemeParams(p=21, n_e=1, n_h=4, s=1, nu=2)  # lam=8, d=3, padded=24
    g = np.arange(1, 22, dtype=np.uint8)
    blocks = partition_gradient(g, params, gf8)
    flat = blocks.reshape(-1)
    assert np.array_equal(flat[:21], g)
    assert np.array_equal(flat[21:], np.zeros(3, dtype=np.uint8))
    assert np.array_equal(reassemble_gradient(blocks, params), g)


def test_single_layer_when_nu_is_max(gf8):
    # nu = n_h - s puts everything in one layer with three subvectors
    params = SchemeParams(p=9, n_e=1, n_h=4, s=1, nu=3)
    assert params.layers == 1 and params.lam == 3 and params.b == 1
    blocks = partition_gradient(np.arange(9, dtype=np.uint8), params, gf8)
    assert blocks.shape == (1, 3, 3)


def test_encode_client_zero_gradient(gf8):
    params = SchemeParams(p=24, n_e=1, n_h=4, s=1, nu=2)
    layers = enumerate_layers(4, 3)
    code = make_generator(gf8, 2, 1)
    arr = encode_client(np.zeros(24, dtype=np.uint8), params, code, layers)
    assert not arr.fragments.any()


def test_encode_client_grid_matches_four_helper_layout(gf8):
    # n_h=4, s=1, nu=2: layers (0,1,2),(0,1,3),(0,2,3),(1,2,3); layer 2 holds
    # (g0, _, g1, p0) so helper 0 sees g0, helper 2 sees g1, helper 3 parity.
    params = SchemeParams(p=24, n_e=1, n_h=4, s=1, nu=2)
    layers = enumerate_layers(4, 3)
    code = make_generator(gf8, 2, 1)
    g = np.arange(24, dtype=np.uint8)
    arr = encode_client(g, params, code, layers)
    blocks = partition_gradient(g, params, gf8)
    assert layers[2] == (0, 2, 3)
    from layeragg.mds import encode as mds_encode

    for layer in range(4):
        assert np.array_equal(arr.fragments[layer], mds_encode(code, blocks[layer]))
    # systematic fragments are the raw subvectors
    assert np.array_equal(arr.fragments[2, 0], blocks[2, 0])
    assert np.array_equal(arr.fragments[2, 1], blocks[2, 1])


def test_encode_client_nu_one_has_six_pair_layers(gf8):
    params = SchemeParams(p=12, n_e=1, n_h=4, s=1, nu=1)
    layers = enumerate_layers(4, 2)
    code = make_generator(gf8, 1, 1)
    arr = encode_client(np.arange(12, dtype=np.uint8), params, code, layers)
    assert arr.fragments.shape == (6, 2, 2)
    assert params.b == 3


def test_columns_have_b_symbols_and_match_grid(gf8):
    params = SchemeParams(p=24, n_e=1, n_h=4, s=1, nu=2)
    layers = enumerate_layers(4, 3)
    code = make_generator(gf8, 2, 1)
    arr = encode_client(np.arange(24, dtype=np.uint8), params, code, layers)
    total = 0
    for j in range(4):
        col = arr.column(j)
        assert col.shape == (params.b, params.d)
        total += col.shape[0]
    assert total == params.layers * (params.nu + params.s)
    # first column rows are layers 0,1,2 at slot 0
    assert arr.column_layers(0) == (0, 1, 2)
    for row, layer in enumerate(arr.column_layers(0)):
        assert np.array_equal(arr.column(0)[row], arr.fragments[layer, 0])


def test_per_layer_any_nu_subset_decodes(gf8):
    from itertools import combinations

    params = SchemeParams(p=30, n_e=1, n_h=5, s=2, nu=2)
    layers = enumerate_layers(5, 4)
    code = make_generator(gf8, 2, 2)
    rng = np.random.default_rng(0)
    g = random_gradient(rng, gf8, 30)
    arr = encode_client(g, params, code, layers)
    blocks = partition_gradient(g, params, gf8)
    for layer in range(params.layers):
        for slots in combinations(range(4), 2):
            got = decode_from(code, list(slots), arr.fragments[layer, list(slots)])
            assert np.array_equal(got, blocks[layer])


def test_encoding_is_linear_in_the_gradient(gf8):
    params = SchemeParams(p=24, n_e=1, n_h=4, s=1, nu=2)
    layers = enumerate_layers(4, 3)
    code = make_generator(gf8, 2, 1)
    rng = np.random.default_rng(9)
    ga = random_gradient(rng, gf8, 24)
    gb = random_gradient(rng, gf8, 24)
    fa = encode_client(ga, params, code, layers).fragments
    fb = encode_client(gb, params, code, layers).fragments
    fsum = encode_client(ga ^ gb, params, code, layers).fragments
    assert np.array_equal(fa ^ fb, fsum)


def test_encode_client_rejects_mismatched_pieces(gf8):
    params = SchemeParams(p=24, n_e=1, n_h=4, s=1, nu=2)
    with pytest.raises(ValueError):
        encode_client(
            np.zeros(24, dtype=np.uint8),
            params,
            make_generator(gf8, 2, 2),
            enumerate_layers(4, 3),
        )
    with pytest.raises(ValueError):
        encode_client(
            np.zeros(24, dtype=np.uint8),
            params,
            make_generator(gf8, 2, 1),
            enumerate_layers(5, 3),
        )


def test_format_layer_grid_shows_fragment_labels():
    params = SchemeParams(p=24, n_e=1, n_h=4, s=1, nu=2)
    grid = format_layer_grid(params, enumerate_layers(4, 3))
    lines = grid.splitlines()
    assert len(lines) == 5
    assert "g0" in lines[1] and "p0" in lines[1]


def test_load_gradient_json_and_raw(tmp_path, gf8):
    jpath = tmp_path / "g.json"
    jpath.write_text(json.dumps([0, 1, 255, 256, 300]))
    g = load_gradient(jpath, gf8)
    assert np.array_equal(g, np.array([0, 1, 255, 0, 44], dtype=np.uint8))

    rpath = tmp_path / "g.bin"
    rpath.write_bytes(bytes([7, 0, 250]))
    g2 = load_gradient(rpath, gf8, p=3)
    assert np.array_equal(g2, np.array([7, 0, 250], dtype=np.uint8))

    with pytest.raises(ConfigurationError):
        load_gradient(rpath, gf8, p=5)

    f16 = GF(16)
    r16 = tmp_path / "g16.bin"
    r16.write_bytes((0x0201).to_bytes(2, "little") + (0xFFFF).to_bytes(2, "little"))
    g3 = load_gradient(r16, f16)
    assert np.array_equal(g3, np.array([0x0201, 0xFFFF], dtype=np.uint16))
    with pytest.raises(ConfigurationError):
        load_gradient(rpath, f16)  # 3 bytes is not a multiple of 2

    bad = tmp_path / "bad.json"
    bad.write_text('{"not": "a list"}')
    with pytest.raises(ConfigurationError):
        load_gradient(bad, gf8)


def test_random_gradient_deterministic(gf8):
    a = random_gradient(np.random.default_rng(5), gf8, 10)
    b = random_gradient(np.random.default_rng(5), gf8, 10)
    assert np.array_equal(a, b)
    assert a.dtype == np.uint8
