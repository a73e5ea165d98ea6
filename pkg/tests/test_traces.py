import math

import numpy as np
import pytest

from streamagg import (
    StreamItem,
    exact_totals,
    gen_synthetic,
    mix_traces,
    read_csv_trace,
    write_csv_trace,
)


class TestSynthetic:
    def test_deterministic_and_complete(self):
        a = gen_synthetic(200, seed=3)
        b = gen_synthetic(200, seed=3)
        assert a == b
        totals = exact_totals(a)
        assert set(totals) == set(range(200))
        assert all(c >= 1.0 for c in totals.values())
        assert all(it.size == 1.0 for it in a)

    def test_seed_changes_trace(self):
        assert gen_synthetic(100, seed=1) != gen_synthetic(100, seed=2)

    def test_key_base_offsets_keys(self):
        items = gen_synthetic(10, seed=0, key_base=500)
        assert set(exact_totals(items)) == set(range(500, 510))

    def test_sorted_mode_keeps_keys_consecutive(self):
        items = gen_synthetic(50, seed=4, shuffle=False)
        seen = []
        for it in items:
            if not seen or seen[-1] != it.key:
                seen.append(it.key)
        assert seen == sorted(set(seen))  # each key appears in one run

    def test_heavy_tail_exponent(self):
        # Counts are ceil(U**(-1/alpha)), so P(count >= x) = (x-1)**-alpha
        # for integer x >= 2; the empirical CCDF slope should sit near -1.2.
        for seed in (0, 7):
            counts = list(exact_totals(gen_synthetic(10_000, seed=seed)).values())
            n = len(counts)
            xs, ys = [], []
            for x in range(2, 61):
                frac = sum(1 for c in counts if c >= x) / n
                if frac > 0:
                    xs.append(math.log(x - 1))
                    ys.append(math.log(frac))
            slope = float(np.polyfit(xs, ys, 1)[0])
            assert abs(slope + 1.2) < 0.1, slope

    def test_validation(self):
        with pytest.raises(ValueError):
            gen_synthetic(0)
        with pytest.raises(ValueError):
            gen_synthetic(10, alpha=0.0)


class TestCsvRoundTrip:
    def test_kv_roundtrip(self, tmp_path):
        path = str(tmp_path / "t.csv")
        items = [StreamItem("flow-1", 2.5), StreamItem("flow-2", 1.0), StreamItem("flow-1", 4.0)]
        write_csv_trace(items, path)
        with open(path) as fh:
            assert fh.readline().strip() == "key,size"
        back = read_csv_trace(path)
        assert back == items

    def test_int_keys_become_strings(self, tmp_path):
        path = str(tmp_path / "t.csv")
        write_csv_trace([StreamItem(7, 1.0)], path)
        assert read_csv_trace(path) == [StreamItem("7", 1.0)]

    def test_flow_schema(self, tmp_path):
        path = str(tmp_path / "f.csv")
        with open(path, "w") as fh:
            fh.write("src_ip,dst_ip,src_port,dst_port,protocol,bytes\n")
            fh.write("10.0.0.1,10.0.0.2,1234,80,6,1500\n")
            fh.write("10.0.0.1,10.0.0.2,1234,80,6,40\n")
        items = read_csv_trace(path)
        assert items == [
            StreamItem("10.0.0.1|10.0.0.2|1234|80|6", 1500.0),
            StreamItem("10.0.0.1|10.0.0.2|1234|80|6", 40.0),
        ]

    def test_unknown_header(self, tmp_path):
        path = str(tmp_path / "bad.csv")
        with open(path, "w") as fh:
            fh.write("name,bytes\nx,1\n")
        with pytest.raises(ValueError, match="unrecognized trace header"):
            read_csv_trace(path)

    def test_ragged_row(self, tmp_path):
        path = str(tmp_path / "bad.csv")
        with open(path, "w") as fh:
            fh.write("key,size\nx,1,extra\n")
        with pytest.raises(ValueError, match="expected 2 fields"):
            read_csv_trace(path)

    def test_nonpositive_size(self, tmp_path):
        path = str(tmp_path / "bad.csv")
        with open(path, "w") as fh:
            fh.write("key,size\nx,0\n")
        with pytest.raises(ValueError, match="positive"):
            read_csv_trace(path)


def _const_trace(key_prefix, size, n):
    return [StreamItem(f"{key_prefix}{i}", size) for i in range(n)]


class TestMix:
    def test_byte_shares_hold_per_window(self):
        a = _const_trace("a", 3.0, 4000)
        b = _const_trace("b", 1.0, 4000)
        out = mix_traces([a, b], [0.75, 0.25], window_items=400, seed=5, total_items=2000)
        assert len(out) == 2000
        for w0 in range(0, 2000, 400):
            window = out[w0 : w0 + 400]
            vol_a = sum(it.size for it in window if it.key.startswith("a"))
            total = sum(it.size for it in window)
            assert abs(vol_a / total - 0.75) < 0.02

    def test_source_order_preserved(self):
        a = [StreamItem(f"a{i}", 1.0) for i in range(300)]
        b = [StreamItem(f"b{i}", 2.0) for i in range(300)]
        out = mix_traces([a, b], window_items=50, seed=9, total_items=400)
        got_a = [it.key for it in out if it.key.startswith("a")]
        assert got_a == [f"a{i}" for i in range(len(got_a))]

    def test_deterministic_by_seed(self):
        a = _const_trace("a", 1.0, 500)
        b = _const_trace("b", 1.0, 500)
        kw = dict(window_items=100, total_items=600)
        assert mix_traces([a, b], seed=1, **kw) == mix_traces([a, b], seed=1, **kw)
        assert mix_traces([a, b], seed=1, **kw) != mix_traces([a, b], seed=2, **kw)

    def test_cycling_replays_short_source(self):
        a = _const_trace("a", 1.0, 10)  # will be exhausted and replayed
        b = _const_trace("b", 1.0, 1000)
        out = mix_traces([a, b], [0.5, 0.5], window_items=100, seed=3, total_items=500)
        a_keys = [it.key for it in out if it.key.startswith("a")]
        assert len(a_keys) > 10  # cycled
        assert a_keys[:10] == [f"a{i}" for i in range(10)]
        assert a_keys[10] == "a0"

    def test_no_cycle_drops_exhausted_source(self):
        a = _const_trace("a", 1.0, 10)
        b = _const_trace("b", 1.0, 1000)
        out = mix_traces([a, b], [0.5, 0.5], window_items=100, seed=3, total_items=500, cycle=False)
        a_count = sum(1 for it in out if it.key.startswith("a"))
        assert a_count == 10
        assert len(out) == 500  # b fills the remainder

    def test_random_shares_vary_by_window(self):
        a = _const_trace("a", 1.0, 5000)
        b = _const_trace("b", 1.0, 5000)
        out = mix_traces([a, b], "random", window_items=200, seed=8, total_items=2000)
        shares = []
        for w0 in range(0, 2000, 200):
            window = out[w0 : w0 + 200]
            shares.append(sum(1 for it in window if it.key.startswith("a")) / 200)
        assert max(shares) - min(shares) > 0.2  # visibly different windows

    def test_validation(self):
        a = _const_trace("a", 1.0, 10)
        with pytest.raises(ValueError):
            mix_traces([])
        with pytest.raises(ValueError):
            mix_traces([a, []])
        with pytest.raises(ValueError):
            mix_traces([a], [0.5, 0.5])
        with pytest.raises(ValueError):
            mix_traces([a], window_items=0)
