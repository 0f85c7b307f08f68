import math
import os
from pathlib import Path

import pytest

import la3

DATA = Path(os.environ.get("LA3_TEST_DATA_DIR", Path(__file__).resolve().parents[2] / "tests" / "data"))


def test_canonical_smiles_ignores_atom_order():
    assert la3.canonical_smiles("OCC") == la3.canonical_smiles("CCO")
    with pytest.raises(la3.DataError):
        la3.canonical_smiles("C1CC")


def test_validity():
    assert la3.is_valid("c1ccccc1") == (True, None)
    valid, reason = la3.is_valid("C(C)(C)(C)(C)C")
    assert not valid
    assert reason


def test_fingerprints():
    assert la3.tanimoto("CCO", "OCC") == 1.0
    assert 0.0 <= la3.tanimoto("CCO", "c1ccccc1", family="keys") < 1.0
    assert len(la3.fingerprint_hex("CCO", family="keys")) == 42
    assert la3.fingerprint_bits("C", family="path") == []


def test_text_metrics():
    assert la3.levenshtein("kitten", "sitting") == 3
    bleu = la3.corpus_bleu(["a b c d"], [["a b c e"]], max_n=2)
    assert abs(bleu - math.sqrt(0.5)) < 1e-9
    p, r, f = la3.rouge("the cat sat", "the cat ate")
    assert abs(f - 2 / 3) < 1e-12
    assert la3.meteor("a b", "b a") == pytest.approx(0.5)
    assert la3.tokenize("CCO", mode="char") == ["C", "C", "O"]


def test_prompt_and_validation():
    system, user = la3.build_prompt("molecule_caption", "702", "CCO", "The molecule is ethanol.")
    assert "CCO" in user
    assert la3.validate_caption("Ethanol, written CCO, is an alcohol.", "CCO") == "smiles_leak"
    assert la3.validate_caption("Ethanol is a small primary alcohol.", "CCO") is None


def test_ground_truth_evaluation(tmp_path):
    corpus = la3.load_corpus(DATA / "molecules.tsv")
    split = la3.make_split([r["id"] for r in corpus], seed=1)
    by_id = {r["id"]: r for r in corpus}
    pred = tmp_path / "gen.tsv"
    pred.write_text("".join(f"{i}\t{by_id[i]['smiles']}\n" for i in split["test"]))
    corpus_tsv = tmp_path / "all.tsv"
    corpus_tsv.write_text("CID\tSMILES\tdescription\n" + "".join(
        f"{by_id[i]['id']}\t{by_id[i]['smiles']}\t{by_id[i]['caption']}\n" for i in split["test"]))
    report = la3.evaluate("gen", pred, corpus_tsv)
    values = {m["name"]: m["value"] for m in report["metrics"]}
    assert values["Exact"] == 1.0
    assert values["Validity"] == 1.0
    assert values["Levenshtein"] == 0.0
    assert values["FCD"] is None
    assert "| 1.000 |" in la3.render_report(la3.evaluate_json("gen", pred, corpus_tsv))


def test_cli_entry_point():
    code, out, err = la3.run_cli(["canonicalize", "OCC", "CCO"])
    assert code == 0
    first, second = out.splitlines()
    assert first == second
    code, _, err = la3.run_cli(["canonicalize", "--bogus"])
    assert code == 1
    assert "Usage" in err
