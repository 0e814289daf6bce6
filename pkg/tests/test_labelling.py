import pytest

from idxcost.errors import AlreadyLabelled
from idxcost.labelling import erase_indexings, label_depths, label_indexed, label_plain, strip_labels
from idxcost.syntax import If, Labelled, Seq, While, iter_labels
from idxcost.textio import parse_stmt, pretty_print


def test_while_skip_plain():
    out = label_plain(parse_stmt("while b do { skip }"))
    expected = parse_stmt("_L0<>: while b do { _a1<>: skip }; _b1<>: skip")
    assert out == expected
    assert parse_stmt(pretty_print(out)) == out


def test_if_labels_both_branches():
    out = label_plain(parse_stmt("if b then { skip }"))
    body = out.body
    assert isinstance(body, If)
    assert isinstance(body.then, Labelled) and isinstance(body.orelse, Labelled)
    assert {body.then.label.atom, body.orelse.label.atom} == {"_a1", "_b1"}


def test_indexed_depths(labelled):
    assert label_depths(labelled) == {"_L0": 0, "_a1": 1, "_b1": 0, "_a2": 2, "_b2": 1}
    loops = []

    def walk(s):
        if isinstance(s, While):
            loops.append(s.index)
            walk(s.body)
        elif isinstance(s, Seq):
            walk(s.first)
            walk(s.second)
        elif isinstance(s, Labelled):
            walk(s.body)

    walk(labelled)
    assert loops == [0, 1]
    assert all(l.indexing.is_identity for l in iter_labels(labelled))


def test_relabel_rejected(labelled):
    with pytest.raises(AlreadyLabelled):
        label_indexed(labelled)


def test_erasures(factorial_text, labelled):
    plain = parse_stmt(factorial_text)
    assert strip_labels(labelled) == strip_labels(label_plain(plain))
    assert erase_indexings(labelled) == label_plain(plain)
    assert strip_labels(labelled) != plain  # labelling adds skips after loops


def test_every_loop_body_starts_with_label(labelled):
    def walk(s):
        if isinstance(s, While):
            assert isinstance(s.body, Labelled)
            walk(s.body)
        elif isinstance(s, Seq):
            walk(s.first)
            walk(s.second)
        elif isinstance(s, If):
            assert isinstance(s.then, Labelled) and isinstance(s.orelse, Labelled)
            walk(s.then)
            walk(s.orelse)
        elif isinstance(s, Labelled):
            walk(s.body)

    walk(labelled)
