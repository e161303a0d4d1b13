import pytest

from parhyp.parallel import pmap, worker_count


def square(x):
    return x * x


def test_worker_count(monkeypatch):
    monkeypatch.delenv("PARHYP_THREADS", raising=False)
    assert worker_count() == 1
    monkeypatch.setenv("PARHYP_THREADS", "3")
    assert worker_count() == 3
    monkeypatch.setenv("PARHYP_THREADS", "0")
    assert worker_count() >= 1
    monkeypatch.setenv("PARHYP_THREADS", "-1")
    with pytest.raises(ValueError):
        worker_count()


@pytest.mark.parametrize("threads", ["1", "2"])
def test_pmap_preserves_order(monkeypatch, threads):
    monkeypatch.setenv("PARHYP_THREADS", threads)
    assert pmap(square, range(50)) == [x * x for x in range(50)]
    assert pmap(square, []) == []
