import numpy as np
import pytest

from g2p_bridge.errors import (
    CorruptFile,
    DivergedLoss,
    FormatVersionMismatch,
    InvalidBeamWidth,
    InvalidConfig,
    SequenceTooLong,
    ShapeMismatch,
)
from g2p_bridge.model import (
    ModelConfig,
    TrainConfig,
    beam_decode,
    build_model,
    forward,
    gradient_check,
    greedy_decode,
    load_checkpoint,
    next_token_accuracy,
    parameter_count,
    save_checkpoint,
    train,
    verify_vocab_compatible,
)
from g2p_bridge.model.network import loss_and_grads, param_specs
from g2p_bridge.model.training import make_batch
from g2p_bridge.tokenizer import BpeTokenizer, EOS_ID


def tiny_config(**overrides):
    base = dict(
        vocab_size=20, encoder_layers=2, decoder_layers=2, attention_heads=2,
        feedforward_dim=32, hidden_size=16, pos_embedding_dim=8,
        dropout=0.0, max_sequence_length=24, dtype="float64",
    )
    base.update(overrides)
    return ModelConfig(**base)


def copy_task_pairs(n, vocab, seed, min_len=3, max_len=7):
    rng = np.random.default_rng(seed)
    pairs = []
    for _ in range(n):
        length = int(rng.integers(min_len, max_len + 1))
        seq = [int(x) for x in rng.integers(4, vocab, size=length)]
        pairs.append((seq, list(seq)))
    return pairs


@pytest.fixture(scope="module")
def copy_model():
    cfg = ModelConfig(
        vocab_size=20, encoder_layers=2, decoder_layers=2, attention_heads=4,
        feedforward_dim=128, hidden_size=64, pos_embedding_dim=32,
        dropout=0.0, max_sequence_length=24, dtype="float32",
    )
    pairs = copy_task_pairs(64, cfg.vocab_size, seed=0)
    model = build_model(cfg, seed=1)
    tc = TrainConfig(batch_size=16, learning_rate=1e-3, max_epochs=60,
                     early_stop_patience=60, seed=0)
    result = train(model, pairs, tc, pairs[:8])
    return result.model, pairs


class TestConfig:
    def test_head_divisibility(self):
        with pytest.raises(InvalidConfig):
            tiny_config(attention_heads=7, hidden_size=512)

    def test_dropout_range(self):
        with pytest.raises(InvalidConfig):
            tiny_config(dropout=1.0)

    def test_positive_counts(self):
        with pytest.raises(InvalidConfig):
            tiny_config(vocab_size=0)

    def test_train_config_validation(self):
        with pytest.raises(InvalidConfig):
            TrainConfig(batch_size=0)
        with pytest.raises(InvalidConfig):
            TrainConfig(learning_rate=0.0)


class TestBuild:
    def test_same_seed_identical(self):
        cfg = tiny_config()
        a = build_model(cfg, seed=5)
        b = build_model(cfg, seed=5)
        for name in a.params:
            assert np.array_equal(a.params[name], b.params[name])

    def test_different_seed_differs(self):
        cfg = tiny_config()
        a = build_model(cfg, seed=5)
        b = build_model(cfg, seed=6)
        assert any(
            not np.array_equal(a.params[n], b.params[n]) for n in a.params
        )

    def test_parameter_count_formula(self):
        cfg = tiny_config()
        model = build_model(cfg, seed=0)
        V, H = cfg.vocab_size, cfg.hidden_size
        P, F = cfg.pos_embedding_dim, cfg.feedforward_dim
        L = cfg.max_sequence_length
        per_attn = 4 * (H * H + H)
        per_ln = 2 * H
        per_ffn = H * F + F + F * H + H
        enc = cfg.encoder_layers * (per_ln + per_attn + per_ln + per_ffn) + per_ln
        dec = cfg.decoder_layers * (
            per_ln + per_attn + per_ln + per_attn + per_ln + per_ffn
        ) + per_ln
        expected = (
            2 * V * H + L * P + P * H + H + enc + dec + H * V + V
        )
        assert parameter_count(model) == expected

    def test_specs_cover_params(self):
        cfg = tiny_config()
        model = build_model(cfg, seed=0)
        assert {n for n, _, _ in param_specs(cfg)} == set(model.params)

    def test_default_config_parameter_count(self):
        # full-scale defaults: 5+5 layers, 8 heads, ffn 1024, hidden 512,
        # positional dim 256; vocab from the tokenizer budget
        cfg = ModelConfig(vocab_size=2372)
        model = build_model(cfg, seed=0)
        from_specs = sum(
            int(np.prod(shape)) for _, shape, _ in param_specs(cfg)
        )
        assert parameter_count(model) == from_specs
        again = build_model(cfg, seed=0)
        assert parameter_count(again) == parameter_count(model)


class TestForward:
    def test_rows_are_distributions(self):
        model = build_model(tiny_config(), seed=2)
        probs = forward(model, [5, 6, 7], [8, 9])
        assert probs.shape == (3, 20)
        assert np.all(probs >= 0)
        assert np.allclose(probs.sum(axis=-1), 1.0, atol=1e-5)

    def test_causality_future_permutation(self):
        model = build_model(tiny_config(), seed=3)
        base = forward(model, [5, 6, 7], [8, 9, 10, 11])
        permuted = forward(model, [5, 6, 7], [8, 9, 11, 10])
        # rows 0..2 depend only on BOS + prefix[:2], identical bit for bit
        assert np.array_equal(base[:3], permuted[:3])
        assert not np.allclose(base[3:], permuted[3:])

    def test_eval_deterministic(self):
        model = build_model(tiny_config(), seed=4)
        a = forward(model, [5, 6], [7])
        b = forward(model, [5, 6], [7])
        assert np.array_equal(a, b)

    def test_train_mode_dropout_differs_from_eval(self):
        model = build_model(tiny_config(dropout=0.5), seed=4)
        eval_out = forward(model, [5, 6], [7])
        train_out = forward(model, [5, 6], [7], train_mode=True,
                            rng=np.random.default_rng(11))
        assert not np.allclose(eval_out, train_out)

    def test_sequence_too_long(self):
        model = build_model(tiny_config(max_sequence_length=4), seed=2)
        with pytest.raises(SequenceTooLong):
            forward(model, [5, 6, 7, 8], [])


class TestGradient:
    def test_float64_precision(self):
        model = build_model(tiny_config(dropout=0.1), seed=1)
        pairs = [([5, 6, 7, 8], [9, 10, 11]), ([6, 5], [10, 9, 12, 13])]
        result = gradient_check(model, pairs, epsilon=1e-5, n_samples=250, seed=3)
        assert result.max_rel_error < 1e-6

    def test_float32_precision(self):
        model = build_model(tiny_config(dtype="float32", dropout=0.2), seed=2)
        pairs = [([5, 6, 7], [9, 10]), ([6, 5, 4, 7], [10, 9, 12])]
        result = gradient_check(model, pairs, epsilon=1e-5, n_samples=250, seed=4)
        assert result.max_rel_error < 1e-3

    def test_corrupted_gradient_named(self):
        cfg = tiny_config(encoder_layers=1, decoder_layers=1)
        model = build_model(cfg, seed=7)
        pairs = [([5, 6, 7], [9, 10])]
        src, dec_in, labels = make_batch(pairs, cfg)
        _, grads, _ = loss_and_grads(model.params, cfg, src, dec_in, labels)
        grads["dec0.ffn.w1"] = grads["dec0.ffn.w1"] + 1.0
        result = gradient_check(model, pairs, n_samples=3000, seed=1,
                                analytic_grads=grads)
        assert result.max_rel_error > 1e-3
        assert result.worst_param == "dec0.ffn.w1"

    def test_zero_samples_is_zero_error(self):
        model = build_model(tiny_config(), seed=7)
        result = gradient_check(model, [([5], [6])], n_samples=0)
        assert result.max_rel_error == 0.0
        assert result.samples == 0


class TestTraining:
    def test_loss_descends(self):
        cfg = tiny_config(dtype="float32")
        pairs = copy_task_pairs(32, cfg.vocab_size, seed=2)
        model = build_model(cfg, seed=3)
        tc = TrainConfig(batch_size=8, learning_rate=1e-3, max_epochs=10,
                         early_stop_patience=10, seed=1)
        result = train(model, pairs, tc, pairs[:4])
        assert result.history[-1].train_loss < result.history[0].train_loss

    def test_early_stopping_on_plateau(self):
        cfg = tiny_config(dtype="float32")
        rng = np.random.default_rng(0)
        pairs = copy_task_pairs(32, cfg.vocab_size, seed=2)
        # unlearnable validation targets force the loss to plateau
        noise_val = [
            (s, [int(x) for x in rng.integers(4, cfg.vocab_size, size=len(t))])
            for s, t in pairs[:8]
        ]
        model = build_model(cfg, seed=3)
        tc = TrainConfig(batch_size=8, learning_rate=1e-3, max_epochs=50,
                         early_stop_patience=2, seed=1)
        result = train(model, pairs, tc, noise_val)
        assert result.stopped_early
        assert len(result.history) < tc.max_epochs

    def test_returns_best_checkpoint(self):
        cfg = tiny_config(dtype="float32")
        pairs = copy_task_pairs(24, cfg.vocab_size, seed=5)
        model = build_model(cfg, seed=3)
        tc = TrainConfig(batch_size=8, learning_rate=1e-3, max_epochs=6,
                         early_stop_patience=6, seed=1)
        result = train(model, pairs, tc, pairs[:4])
        best = result.history[result.best_epoch - 1].val_loss
        assert best == min(h.val_loss for h in result.history)

    def test_copy_task_accuracy(self, copy_model):
        model, pairs = copy_model
        assert next_token_accuracy(model, pairs) >= 0.99

    @pytest.mark.filterwarnings("ignore::RuntimeWarning")
    def test_diverged_loss(self):
        cfg = tiny_config(dtype="float32")
        pairs = copy_task_pairs(16, cfg.vocab_size, seed=6)
        model = build_model(cfg, seed=3)
        tc = TrainConfig(batch_size=8, learning_rate=1e6, max_epochs=20,
                         early_stop_patience=20, seed=1)
        with pytest.raises(DivergedLoss):
            train(model, pairs, tc, pairs[:4])

    def test_train_reproducible(self):
        cfg = tiny_config(dtype="float32", dropout=0.2)
        pairs = copy_task_pairs(16, cfg.vocab_size, seed=9)
        tc = TrainConfig(batch_size=8, learning_rate=1e-3, max_epochs=3,
                         early_stop_patience=3, seed=4)
        a = train(build_model(cfg, seed=2), pairs, tc, pairs[:4])
        b = train(build_model(cfg, seed=2), pairs, tc, pairs[:4])
        for name in a.model.params:
            assert np.array_equal(a.model.params[name], b.model.params[name])
        assert [h.val_loss for h in a.history] == [h.val_loss for h in b.history]

    def test_input_model_not_mutated(self):
        cfg = tiny_config(dtype="float32")
        pairs = copy_task_pairs(8, cfg.vocab_size, seed=7)
        model = build_model(cfg, seed=3)
        before = {k: v.copy() for k, v in model.params.items()}
        tc = TrainConfig(batch_size=4, learning_rate=1e-3, max_epochs=2,
                         early_stop_patience=2, seed=1)
        train(model, pairs, tc, pairs[:2])
        for name in before:
            assert np.array_equal(model.params[name], before[name])


class TestDecoding:
    def test_copy_task_greedy(self, copy_model):
        model, pairs = copy_model
        for src, _ in pairs[:10]:
            result = greedy_decode(model, src, max_len=16)
            assert result.ids == src
            assert not result.truncated

    def test_immediate_eos_gives_empty(self):
        model = build_model(tiny_config(), seed=8)
        model.params["out.b"] = model.params["out.b"].copy()
        model.params["out.b"][EOS_ID] = 50.0
        result = greedy_decode(model, [5, 6], max_len=8)
        assert result.ids == []
        assert not result.truncated

    def test_truncation_flagged(self):
        model = build_model(tiny_config(), seed=8)
        model.params["out.b"] = model.params["out.b"].copy()
        model.params["out.b"][7] = 50.0  # never emits EOS
        result = greedy_decode(model, [5, 6], max_len=5)
        assert result.ids == [7] * 5
        assert result.truncated

    def test_beam_one_equals_greedy(self, copy_model):
        model, pairs = copy_model
        for src, _ in pairs[:6]:
            g = greedy_decode(model, src, max_len=16)
            b = beam_decode(model, src, beam_width=1, max_len=16)
            assert b.ids == g.ids
            assert b.truncated == g.truncated
            assert b.log_prob == pytest.approx(g.log_prob, abs=1e-9)

    def test_beam_dominates_greedy(self, copy_model):
        model, pairs = copy_model
        for src, _ in pairs[:6]:
            g = greedy_decode(model, src, max_len=16)
            b = beam_decode(model, src, beam_width=4, max_len=16)
            assert b.normalized_score >= g.normalized_score - 1e-12

    def test_invalid_beam_width(self):
        model = build_model(tiny_config(), seed=8)
        with pytest.raises(InvalidBeamWidth):
            beam_decode(model, [5], beam_width=0, max_len=4)

    def test_source_too_long(self):
        model = build_model(tiny_config(max_sequence_length=4), seed=8)
        with pytest.raises(SequenceTooLong):
            greedy_decode(model, [5, 6, 7, 8], max_len=2)


class TestCheckpoint:
    def test_roundtrip_bit_identical_forward(self, tmp_path):
        model = build_model(tiny_config(dtype="float32", dropout=0.3), seed=9)
        path = tmp_path / "m.ckpt"
        save_checkpoint(model, path, meta={"seed": 9})
        loaded = load_checkpoint(path)
        assert loaded.config == model.config
        a = forward(model, [5, 6, 7], [8])
        b = forward(loaded, [5, 6, 7], [8])
        assert np.array_equal(a, b)

    def test_vocab_mismatch(self, tmp_path):
        model = build_model(tiny_config(), seed=9)
        tok = BpeTokenizer(
            vocab={t: i for i, t in enumerate(
                ("<pad>", "<bos>", "<eos>", "<unk>", "a", "b")
            )},
            merges=[],
        )
        with pytest.raises(ShapeMismatch):
            verify_vocab_compatible(model, tok)

    def test_truncated_file(self, tmp_path):
        model = build_model(tiny_config(), seed=9)
        path = tmp_path / "m.ckpt"
        save_checkpoint(model, path)
        data = path.read_bytes()
        (tmp_path / "cut.ckpt").write_bytes(data[: len(data) // 2])
        with pytest.raises(CorruptFile):
            load_checkpoint(tmp_path / "cut.ckpt")

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "junk.ckpt"
        path.write_bytes(b"NOPE" + b"\x00" * 64)
        with pytest.raises(CorruptFile):
            load_checkpoint(path)

    def test_version_mismatch(self, tmp_path):
        model = build_model(tiny_config(), seed=9)
        path = tmp_path / "m.ckpt"
        save_checkpoint(model, path)
        data = bytearray(path.read_bytes())
        data[4:8] = (99).to_bytes(4, "little")
        (tmp_path / "v99.ckpt").write_bytes(bytes(data))
        with pytest.raises(FormatVersionMismatch):
            load_checkpoint(tmp_path / "v99.ckpt")

    def test_shape_mismatch_on_edited_dims(self, tmp_path):
        model = build_model(tiny_config(), seed=9)
        path = tmp_path / "m.ckpt"
        save_checkpoint(model, path)
        loaded = load_checkpoint(path)
        for name in loaded.params:
            assert np.array_equal(loaded.params[name], model.params[name])
