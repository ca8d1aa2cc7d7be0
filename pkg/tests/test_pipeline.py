"""Load pipeline: chunking, ordering, back-pressure, and error surfacing."""

import time

import numpy as np
import pytest

from sol.errors import ParseError
from sol.pario import pipeline_load, write_libsvm
from sol.pario.formats import parse_libsvm_line
from sol.synth import make_random_stream


def _write_stream(tmp_path, n=100, d=30, seed=0, name="data.libsvm"):
    data = make_random_stream(n, d=d, seed=seed)
    examples = []
    for chunk in data.iter_chunks(n):
        examples.extend(chunk.examples)
    path = tmp_path / name
    write_libsvm(examples, path)
    return path, examples


class TestChunking:
    def test_sizes_and_sequence_ids(self, tmp_path):
        path, _ = _write_stream(tmp_path, n=10)
        chunks = list(pipeline_load(str(path), chunk_size=4))
        assert [len(c) for c in chunks] == [4, 4, 2]
        assert [c.sequence_id for c in chunks] == [0, 1, 2]

    def test_chunk_size_validated(self, tmp_path):
        path, _ = _write_stream(tmp_path, n=4)
        with pytest.raises(Exception):
            pipeline_load(str(path), chunk_size=0)


class TestOrderEquivalence:
    @pytest.mark.parametrize("workers", [1, 4])
    @pytest.mark.parametrize("buffer_chunks", [1, 4, 16])
    def test_matches_sequential_parse(self, tmp_path, workers, buffer_chunks):
        path, _ = _write_stream(tmp_path, n=257, seed=3)
        expected = [parse_libsvm_line(l)
                    for l in path.read_text().splitlines()]
        got = []
        for chunk in pipeline_load(str(path), chunk_size=32,
                                   buffer_chunks=buffer_chunks,
                                   parse_workers=workers):
            got.extend(chunk.examples)
        assert len(got) == len(expected)
        for a, b in zip(got, expected):
            assert a.label == b.label
            assert a.features == b.features

    def test_identical_across_runs(self, tmp_path):
        path, _ = _write_stream(tmp_path, n=300, seed=5)

        def collect(**kw):
            out = []
            for chunk in pipeline_load(str(path), chunk_size=16, **kw):
                out.append((chunk.labels.copy(), chunk.indices.copy(),
                            chunk.values.copy()))
            return out

        a = collect(parse_workers=4, buffer_chunks=16)
        b = collect(parse_workers=1, buffer_chunks=1)
        assert len(a) == len(b)
        for (la, ia, va), (lb, ib, vb) in zip(a, b):
            assert np.array_equal(la, lb)
            assert np.array_equal(ia, ib)
            assert np.array_equal(va, vb)


class TestBackPressure:
    def test_reader_stalls_when_consumer_sleeps(self, tmp_path):
        # 200 chunks available, buffer capacity 4, workers 2: the reader
        # must stop after at most capacity + in-flight + 1 batches
        path, _ = _write_stream(tmp_path, n=800, seed=7)
        pipe = pipeline_load(str(path), chunk_size=4, buffer_chunks=4,
                             parse_workers=2)
        it = iter(pipe)
        next(it)
        time.sleep(0.3)
        produced_after_pause = pipe._produced
        assert produced_after_pause <= 4 + 2 + 2
        time.sleep(0.2)
        assert pipe._produced == produced_after_pause  # fully stalled
        pipe.close()

    def test_consumption_resumes_after_stall(self, tmp_path):
        path, expected = _write_stream(tmp_path, n=100, seed=9)
        pipe = pipeline_load(str(path), chunk_size=4, buffer_chunks=2)
        total = 0
        for i, chunk in enumerate(pipe):
            if i == 3:
                time.sleep(0.2)
            total += len(chunk)
        assert total == 100


class TestErrorSurfacing:
    def test_parse_error_on_consumer_side_with_line(self, tmp_path):
        path, _ = _write_stream(tmp_path, n=50, seed=11)
        lines = path.read_text().splitlines()
        lines[37] = "+1 not-a-pair"
        path.write_text("\n".join(lines) + "\n")
        with pytest.raises(ParseError) as err:
            for _ in pipeline_load(str(path), chunk_size=8):
                pass
        assert "38" in str(err.value)  # 1-based line number

    def test_missing_file_surfaces(self):
        with pytest.raises(OSError):
            for _ in pipeline_load("/nonexistent/file.libsvm"):
                pass

    def test_skip_bad_lines_counts_and_continues(self, tmp_path):
        path, _ = _write_stream(tmp_path, n=50, seed=13)
        lines = path.read_text().splitlines()
        lines[10] = "+1 junk"
        lines[20] = "nolabel"
        path.write_text("\n".join(lines) + "\n")
        pipe = pipeline_load(str(path), chunk_size=8, skip_bad_lines=True)
        total = sum(len(c) for c in pipe)
        assert total == 48
        assert pipe.skipped_lines == 2

    def test_early_close_shuts_down_cleanly(self, tmp_path):
        path, _ = _write_stream(tmp_path, n=500, seed=15)
        pipe = pipeline_load(str(path), chunk_size=4, buffer_chunks=2)
        it = iter(pipe)
        next(it)
        pipe.close()  # no hang, no error


class TestBinaryAndCsvThroughPipeline:
    def test_binary_source(self, tmp_path):
        from sol.pario import write_binary

        path, examples = _write_stream(tmp_path, n=64, seed=17)
        bin_path = tmp_path / "data.bin"
        write_binary(examples, bin_path)
        got = []
        for chunk in pipeline_load(str(bin_path), chunk_size=10):
            got.extend(chunk.examples)
        assert len(got) == 64
        for a, b in zip(got, examples):
            assert a.label == b.label and a.features == b.features

    def test_csv_source(self, tmp_path):
        rows = ["label,f1,f2"]
        rows += [f"{i % 2},{i * 0.5},{(i + 1) * 0.25}" for i in range(20)]
        path = tmp_path / "data.csv"
        path.write_text("\n".join(rows) + "\n")
        chunks = list(pipeline_load(str(path), chunk_size=6))
        assert sum(len(c) for c in chunks) == 20
        assert chunks[0].labels[1] == 1
