import pytest

from cadact.errors import DanglingLoop, EmptyInput, EmptySequence, MalformedToken
from cadact.sequences import (
    CadSequence,
    parse_file_text,
    parse_sequence,
    sequence_stats,
    serialize_sequence,
    validate,
)


def tok(code, **kw):
    names = ("t", "x", "y", "alpha", "f", "r", "theta", "phi", "gamma",
             "px", "py", "pz", "s", "e1", "e2", "u", "b")
    vals = [-1] * 17
    vals[0] = code
    for k, v in kw.items():
        vals[names.index(k)] = v
    return ",".join(str(v) for v in vals)


def extrude_tok(u=0, b=0, e1=160, e2=128, s=128, theta=128, phi=128, gamma=128,
                px=128, py=128, pz=128):
    return tok(5, theta=theta, phi=phi, gamma=gamma, px=px, py=py, pz=pz,
               s=s, e1=e1, e2=e2, u=u, b=b)


CIRCLE_SEQ = tok(2, x=128, y=128, r=64) + ";" + extrude_tok()

SQUARE = ";".join([
    tok(0, x=64, y=64),
    tok(0, x=192, y=64),
    tok(0, x=192, y=192),
    tok(0, x=64, y=192),
])


def test_minimal_circle_sequence():
    seq = parse_sequence(CIRCLE_SEQ)
    assert len(seq.records) == 1
    rec = seq.records[0]
    assert len(rec.loops) == 1
    assert rec.loops[0].primitives[0].kind == "circle"
    assert rec.e1 == 160 and rec.u == 0 and rec.b == 0


def test_unknown_command_code_rejected():
    bad = tok(3) + ";" + extrude_tok()
    with pytest.raises(MalformedToken):
        parse_sequence(bad.replace("3,", "3,", 1))


def test_code_three_is_malformed():
    with pytest.raises(MalformedToken):
        parse_sequence(tok(3))


def test_dangling_loop():
    with pytest.raises(DanglingLoop):
        parse_sequence(SQUARE)


def test_empty_sequence():
    with pytest.raises(EmptySequence):
        parse_sequence("   # only a comment")


def test_wrong_arity_rejected():
    with pytest.raises(MalformedToken):
        parse_sequence("2,128,128")


def test_value_in_unused_slot_rejected():
    bad = tok(2, x=128, y=128, r=64).replace("-1", "7", 1)
    with pytest.raises(MalformedToken):
        parse_sequence(bad + ";" + extrude_tok())


def test_used_field_out_of_domain_rejected():
    with pytest.raises(MalformedToken):
        parse_sequence(tok(2, x=300, y=128, r=64) + ";" + extrude_tok())


def test_two_loops_split_at_separator():
    text = ";".join([tok(2, x=100, y=100, r=20), tok(4), SQUARE, extrude_tok()])
    seq = parse_sequence(text)
    assert len(seq.records) == 1
    assert len(seq.records[0].loops) == 2
    assert len(seq.records[0].loops[1].primitives) == 4


def test_round_trip_identity():
    text = ";".join([
        tok(2, x=100, y=100, r=20), tok(4), SQUARE, extrude_tok(),
        tok(0, x=90, y=90), tok(1, x=160, y=90, alpha=128, f=1),
        tok(0, x=90, y=160), extrude_tok(u=2, b=1, e1=96),
    ])
    seq = parse_sequence(text)
    again = parse_sequence(serialize_sequence(seq))
    assert again.records == seq.records


def test_record_count_matches_extrusion_tokens():
    text = ";".join([CIRCLE_SEQ, tok(2, x=80, y=80, r=30), extrude_tok(u=1)])
    seq = parse_sequence(text)
    assert len(seq.records) == text.count("5,")  # t=5 appears only as code here
    loops = sum(len(r.loops) for r in seq.records)
    assert loops == 2


def test_file_parsing_with_comments():
    text = "# header\n" + CIRCLE_SEQ + "\n\n" + CIRCLE_SEQ + "  # trailing\n"
    seqs = parse_file_text(text, source_prefix="f")
    assert len(seqs) == 2
    assert seqs[0].source_id == "f:00002"


# --- validate ---------------------------------------------------------------

def test_validate_clean_two_record_sequence():
    text = ";".join([CIRCLE_SEQ, SQUARE, extrude_tok(u=2)])
    report = validate(parse_sequence(text))
    assert report.ok


def test_validate_first_op_must_be_new():
    seq = parse_sequence(tok(2, x=128, y=128, r=64) + ";" + extrude_tok(u=1))
    report = validate(seq)
    assert any(code == "first-op" for _, code, _ in report.violations)


def test_validate_circle_loop_arity():
    text = ";".join([tok(2, x=100, y=100, r=20), tok(2, x=150, y=150, r=20),
                     extrude_tok()])
    report = validate(parse_sequence(text))
    assert any(code == "loop-arity" for _, code, _ in report.violations)


def test_validate_zero_sweep_arc_and_zero_radius():
    text = ";".join([tok(0, x=90, y=90), tok(1, x=160, y=90, alpha=0, f=1),
                     extrude_tok()])
    report = validate(parse_sequence(text))
    assert any("zero-sweep" in msg for _, _, msg in report.violations)
    text2 = tok(2, x=128, y=128, r=0) + ";" + extrude_tok()
    report2 = validate(parse_sequence(text2))
    assert any("radius" in msg for _, _, msg in report2.violations)


def test_validate_is_pure():
    seq = parse_sequence(CIRCLE_SEQ)
    r1, r2 = validate(seq), validate(seq)
    assert r1.violations == r2.violations


# --- stats ------------------------------------------------------------------

def test_stats_counts_kinds():
    text = ";".join([tok(2, x=100, y=100, r=20), extrude_tok(),
                     tok(2, x=150, y=150, r=10), tok(4), SQUARE, extrude_tok(u=2)])
    stats = sequence_stats([parse_sequence(text)])
    assert stats.primitive_kinds == {"circle": 2, "line": 4}
    assert stats.loops_per_record == {1: 1, 2: 1}
    assert stats.records_per_sequence == {2: 1}


def test_stats_totals_match_token_recount():
    # Independent oracle: recount primitive tokens straight from the text.
    from cadact.synth import generate_sequence

    seqs = [generate_sequence(seed) for seed in range(100)]
    stats = sequence_stats(seqs)
    raw_counts = {"line": 0, "arc": 0, "circle": 0}
    code_for = {"0": "line", "1": "arc", "2": "circle"}
    for seq in seqs:
        for token in serialize_sequence(seq).split(";"):
            code = token.split(",", 1)[0]
            if code in code_for:
                raw_counts[code_for[code]] += 1
    assert {k: v for k, v in raw_counts.items() if v} == stats.primitive_kinds
    assert sum(stats.records_per_sequence.values()) == len(seqs)


def test_stats_empty_input():
    with pytest.raises(EmptyInput):
        sequence_stats([])


def test_grammar_counts_records_and_loops():
    text = ";".join([
        tok(2, x=100, y=100, r=20), tok(4), SQUARE, extrude_tok(),
        tok(2, x=150, y=150, r=10), extrude_tok(u=2),
    ])
    seq = parse_sequence(text)
    n_t5 = sum(1 for t in text.split(";") if t.startswith("5,"))
    n_t4 = sum(1 for t in text.split(";") if t.startswith("4,"))
    assert len(seq.records) == n_t5
    assert sum(len(r.loops) for r in seq.records) == n_t4 + n_t5


def test_stats_table_csv_rows():
    stats = sequence_stats([parse_sequence(CIRCLE_SEQ)])
    rows = stats.csv_rows()
    assert rows[0] == "table,key,count"
    assert "primitive_kinds,circle,1" in rows
