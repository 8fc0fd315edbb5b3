import numpy as np

from cascadelab.rng import (
    DOMAIN_BENCHMARK,
    PathStream,
    block_uniforms,
    block_uniforms_array,
    philox4x32,
    split_seed,
    word_to_uniform,
)


def test_philox_known_answers():
    # published Random123 vectors for philox4x32-10
    assert philox4x32((0, 0, 0, 0), (0, 0)) == (0x6627E8D5, 0xE169C58D, 0xBC57AC4C, 0x9B00DBD8)
    assert philox4x32((0xFFFFFFFF,) * 4, (0xFFFFFFFF,) * 2) == (0x408F276D, 0x41C83B0E, 0xA20BC7C6, 0x6D5451FD)
    assert philox4x32((0x243F6A88, 0x85A308D3, 0x13198A2E, 0x03707344), (0xA4093822, 0x299F31D0)) == (
        0xD16CFE09, 0x94FDCCEB, 0x5001E420, 0x24126EA1)


def test_uniforms_open_interval():
    assert 0.0 < word_to_uniform(0) < word_to_uniform(0xFFFFFFFF) < 1.0


def test_split_seed():
    assert split_seed(2**40 + 5) == (5, 256)


def test_streams_are_pure_functions():
    a = PathStream(3, 17)
    b = PathStream(3, 17)
    assert a.block(5) == b.block(5) == block_uniforms(3, 0, 17, 5)
    assert a.block(5) != PathStream(3, 18).block(5)
    assert a.block(5) != PathStream(4, 17).block(5)
    assert a.block(5) != PathStream(3, 17, DOMAIN_BENCHMARK).block(5)


def test_side_stream_independent_of_blocks():
    s = PathStream(1, 2)
    draws = [s.random() for _ in range(9)]
    assert len(set(draws)) == 9
    assert not set(draws) & set(s.block(0))


def test_vectorised_blocks_match_scalar():
    paths = np.array([0, 1, 2**33 + 7, 123456789], dtype=np.uint64)
    arr = block_uniforms_array(99, DOMAIN_BENCHMARK, paths, 4)
    for i, p in enumerate(paths):
        assert tuple(arr[i]) == block_uniforms(99, DOMAIN_BENCHMARK, int(p), 4)


def test_uniformity_smoke():
    u = block_uniforms_array(0, 0, np.arange(20000, dtype=np.uint64), 1)
    assert abs(u.mean() - 0.5) < 0.01
    assert abs(np.corrcoef(u[:, 0], u[:, 1])[0, 1]) < 0.03
