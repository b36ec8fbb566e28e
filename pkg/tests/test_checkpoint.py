import pytest

from dbspan.checkpoint import MAGIC, CheckpointError, read_records, write_records


def test_roundtrip(tmp_path):
    p = tmp_path / "x.ckpt"
    recs = [{"kind": "census", "lo": "1"}, {"lo": "1", "misses": ["103"]}]
    write_records(p, recs)
    assert read_records(p) == recs
    assert not (tmp_path / "x.ckpt.tmp").exists()


def test_flipped_byte(tmp_path):
    p = tmp_path / "x.ckpt"
    write_records(p, [{"a": 1}, {"b": 2}])
    data = bytearray(p.read_bytes())
    data[len(MAGIC) + 6] ^= 0x01
    p.write_bytes(bytes(data))
    with pytest.raises(CheckpointError, match="hash"):
        read_records(p)


def test_truncated(tmp_path):
    p = tmp_path / "x.ckpt"
    write_records(p, [{"a": 1}, {"b": 2}])
    p.write_bytes(p.read_bytes()[:-5])
    with pytest.raises(CheckpointError):
        read_records(p)


def test_wrong_magic(tmp_path):
    p = tmp_path / "x.ckpt"
    p.write_bytes(b"NOTACKPT" + bytes(40))
    with pytest.raises(CheckpointError, match="not a census checkpoint"):
        read_records(p)


def test_corrupt_checkpoint_refuses_resume(tmp_path):
    from dbspan.search import census

    p = tmp_path / "c.ckpt"
    census(1, 300, 2, checkpoint=p, interval=100)
    data = bytearray(p.read_bytes())
    data[-1] ^= 0xFF
    p.write_bytes(bytes(data))
    with pytest.raises(CheckpointError):
        census(1, 300, 2, checkpoint=p, resume=True, interval=100)
