"""The whole pipeline through the CLI, exactly as a shell user would run it:
split -> train-tokenizer -> train -> convert -> evaluate.

Run: python demos/06_full_pipeline.py  (about half a minute)
"""

import json
import subprocess
import sys
import tempfile
from importlib import resources
from pathlib import Path

toy = str(resources.files("g2p_bridge.data") / "toy_corpus.jsonl")
work = Path(tempfile.mkdtemp(prefix="g2p-demo-"))
print("working directory:", work)


def cli(*args, stdin=None):
    proc = subprocess.run(
        [sys.executable, "-m", "g2p_bridge", *args],
        capture_output=True, text=True, input=stdin,
    )
    if proc.returncode != 0:
        raise SystemExit(f"step failed: {args}\n{proc.stderr}")
    return proc.stdout


print(cli("split", "--corpus", toy, "--out", str(work / "split.jsonl"),
          "--val-n", "10", "--test-n", "10", "--seed", "5"), end="")
print(cli("train-tokenizer", "--corpus", str(work / "split.jsonl"),
          "--out", str(work / "tok.txt"),
          "--vocab-limit", "300", "--min-frequency", "2"), end="")
print(cli("train", "--corpus", str(work / "split.jsonl"),
          "--tokenizer", str(work / "tok.txt"),
          "--out", str(work / "model.ckpt"),
          "--encoder-layers", "2", "--decoder-layers", "2", "--heads", "4",
          "--hidden-size", "64", "--ffn-dim", "128", "--pos-dim", "32",
          "--dropout", "0.1", "--max-seq-len", "64", "--batch-size", "16",
          "--lr", "1e-3", "--epochs", "25", "--patience", "25",
          "--seed", "7"), end="")

sample = "کتاب خوب است"
pinglish = cli("convert", "--model", str(work / "model.ckpt"),
               "--tokenizer", str(work / "tok.txt"), stdin=sample + "\n")
print(f"convert: {sample} -> {pinglish.strip()}")

print(cli("evaluate", "--model", str(work / "model.ckpt"),
          "--tokenizer", str(work / "tok.txt"),
          "--corpus", str(work / "split.jsonl"),
          "--report", str(work / "report.json"),
          "--bleu-order", "2", "--seed", "7"), end="")

report = json.loads((work / "report.json").read_text(encoding="utf-8"))
print("\nreport meta:", report["meta"])
