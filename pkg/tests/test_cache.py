import json
import threading

from gmpy2 import mpq
from hypothesis import given, settings

from qtau.cache import CacheStore, decode_line, encode_line
from qtau.partitions import StrictPartition, strict_up_to
from qtau.polyring import OddPolynomial
from qtau.qschur import QMacTable, build_levels
from strategies import polynomials


def P(*parts):
    return StrictPartition(parts)


@settings(max_examples=40)
@given(polynomials(9))
def test_line_round_trip(p):
    back = decode_line(json.loads(encode_line("k", p)))
    assert back == p and back.cap == p.cap
    assert all(type(c) is type(mpq(0)) for c in back.terms.values())


def test_store_round_trip_bit_exact(cache_dir):
    table = QMacTable(CacheStore(cache_dir))
    build_levels(table, 10)
    fresh = QMacTable(CacheStore(cache_dir))
    for lam in strict_up_to(10):
        assert fresh.get(lam) == table.get(lam)
    assert fresh.pfaffian_evaluations == 0
    assert fresh.store.hits == len(strict_up_to(10)) - 1


def test_results_independent_of_cache(cache_dir):
    plain, cached = QMacTable(), QMacTable(CacheStore(cache_dir))
    build_levels(plain, 9)
    build_levels(cached, 9)
    assert plain._memo == cached._memo


def test_corrupt_line_detected_and_recomputed(cache_dir):
    table = QMacTable(CacheStore(cache_dir))
    build_levels(table, 6)
    path = cache_dir / "qmac-w06.jsonl"
    lines = path.read_text().splitlines()
    # flip one coefficient while keeping the line valid JSON
    obj = json.loads(lines[0])
    first, rest = obj["coeffs"].split(" ", 1)
    obj["coeffs"] = f"{first}1 {rest}"
    lines[0] = json.dumps(obj, separators=(",", ":"))
    path.write_text("\n".join(lines) + "\n")
    store = CacheStore(cache_dir)
    fresh = QMacTable(store)
    lam = StrictPartition(tuple(int(x) for x in obj["key"].split(":")[1].split(",")))
    assert fresh.get(lam) == table.get(lam)
    assert store.corrupt == 1 and fresh.pfaffian_evaluations == 1


def test_garbage_line_ignored(cache_dir):
    store = CacheStore(cache_dir)
    store.put(P(3), 3, OddPolynomial.one(3))
    store.flush()
    with (cache_dir / "qmac-w03.jsonl").open("a") as fh:
        fh.write("{not json\n")
    again = CacheStore(cache_dir)
    assert again.get(P(3), 3) == OddPolynomial.one(3)
    assert again.corrupt == 1


def test_duplicate_puts_are_deduplicated(cache_dir):
    store = CacheStore(cache_dir)
    for _ in range(3):
        store.put(P(2), 2, OddPolynomial.one(2))
    store.flush()
    store.put(P(2), 2, OddPolynomial.one(2))
    store.flush()
    assert len((cache_dir / "qmac-w02.jsonl").read_text().splitlines()) == 1


def test_concurrent_writers_share_one_index(cache_dir):
    def work(lo):
        store = CacheStore(cache_dir)
        for w in range(lo, lo + 3):
            store.put(P(w), w, OddPolynomial.one(w))
        store.flush()

    threads = [threading.Thread(target=work, args=(lo,)) for lo in (1, 4, 7)]
    for th in threads:
        th.start()
    for th in threads:
        th.join()
    store = CacheStore(cache_dir)
    assert len(store) == 9
    assert all(store.get(P(w), w) == OddPolynomial.one(w) for w in range(1, 10))
