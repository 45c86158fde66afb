"""Veracity classifier: attention oracle, masking, gradients, training."""

import numpy as np
import pytest

from panacea.corpus import ClaimLabel
from panacea.errors import BadCheckpoint, EmptyDataset, NoEvidence, ShapeMismatch
from panacea.mlcore import gradient_check, softmax
from panacea.nlisan import (
    NlisanParams,
    assemble_inputs,
    attention_forward,
    check_gradients,
    classify,
    loss_and_grads,
    train,
)
from panacea.retrieval import HashedTfidfEncoder

from _datagen import nlisan_separable_dataset


def naive_attention(params, S, I, mask):
    """Independent triple-loop reference for the attention layer."""
    n_slots, h = params.N, params.h
    present = [i for i in range(n_slots) if mask[i]]
    Q = {i: np.array([sum(I[i][a] * params.W_Q[a][c] for a in range(3)) for c in range(h)])
         for i in present}
    K = {j: np.array([sum(S[j][a] * params.W_K[a][c] for a in range(params.d)) for c in range(h)])
         for j in present}
    V = {j: np.array([sum(S[j][a] * params.W_V[a][c] for a in range(params.d)) for c in range(h)])
         for j in present}
    O = np.zeros((n_slots, h))
    for i in present:
        scores = [float(np.dot(Q[i], K[j])) / np.sqrt(h) for j in present]
        exps = [np.exp(s - max(scores)) for s in scores]
        alphas = [e / sum(exps) for e in exps]
        for alpha, j in zip(alphas, present):
            O[i] += alpha * V[j]
    return O.reshape(-1)


def random_instance(rng, d=8, h=4, n_slots=3, m=6, n_present=None):
    params = NlisanParams.init(d=d, h=h, N=n_slots, m=m, seed=int(rng.integers(10_000)))
    S = rng.standard_normal((n_slots, d))
    I = rng.dirichlet(np.ones(3), size=n_slots)
    mask = np.zeros(n_slots, dtype=bool)
    n_present = n_present or rng.integers(1, n_slots + 1)
    mask[:n_present] = True
    S[~mask] = 0.0
    I[~mask] = (0.0, 1.0, 0.0)
    return params, S, I, mask


class TestAttentionForward:
    def test_single_present_pair_copies_value(self):
        rng = np.random.default_rng(0)
        params, S, I, mask = random_instance(rng, n_present=1)
        flat, attn = attention_forward(params, S, I, mask)
        assert attn.shape == (1, 1)
        assert attn[0, 0] == 1.0
        v = S[0] @ params.W_V
        np.testing.assert_array_equal(flat[:params.h], v)
        assert np.all(flat[params.h:] == 0.0)

    def test_zero_query_weights_give_uniform_attention(self):
        rng = np.random.default_rng(1)
        params, S, I, mask = random_instance(rng, n_present=3)
        params.W_Q[:] = 0.0
        _, attn = attention_forward(params, S, I, mask)
        np.testing.assert_allclose(attn, np.full((3, 3), 1.0 / 3.0), atol=1e-15)

    def test_matches_naive_loop_oracle(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            params, S, I, mask = random_instance(rng)
            flat, _ = attention_forward(params, S, I, mask)
            np.testing.assert_allclose(flat, naive_attention(params, S, I, mask),
                                       atol=1e-12)

    def test_attention_rows_sum_to_one(self):
        rng = np.random.default_rng(3)
        for _ in range(10):
            params, S, I, mask = random_instance(rng)
            _, attn = attention_forward(params, S, I, mask)
            np.testing.assert_allclose(attn.sum(axis=1), 1.0, atol=1e-9)

    def test_shape_mismatch(self):
        rng = np.random.default_rng(4)
        params, S, I, mask = random_instance(rng)
        with pytest.raises(ShapeMismatch):
            attention_forward(params, S[:, :-1], I, mask)


class TestAssembleInputs:
    def test_no_evidence_raises(self):
        enc = HashedTfidfEncoder(dim=16)
        with pytest.raises(NoEvidence):
            assemble_inputs("claim", [], enc)

    def test_padding_slots(self):
        enc = HashedTfidfEncoder(dim=16)
        S, I, mask = assemble_inputs("claim", ["e one x", "e two y", "e three z"],
                                     enc, n_slots=10)
        assert mask.sum() == 3
        assert np.all(S[3:] == 0.0)
        np.testing.assert_array_equal(I[3:], np.tile((0.0, 1.0, 0.0), (7, 1)))

    def test_truncation_keeps_highest_relevance(self):
        class Ev:
            def __init__(self, text, relevance):
                self.text = text
                self.relevance = relevance

        class RecordingEncoder(HashedTfidfEncoder):
            def __init__(self):
                super().__init__(dim=16)
                self.seen = []

            def encode(self, text):
                self.seen.append(text)
                return super().encode(text)

        enc = RecordingEncoder()
        evidences = [Ev(f"text {i}", relevance=i / 12.0) for i in range(12)]
        S, I, mask = assemble_inputs("claim", evidences, enc, n_slots=10)
        assert mask.sum() == 10
        # the two lowest-relevance evidences (0 and 1) are dropped
        assert "claim ||| text 0" not in enc.seen
        assert "claim ||| text 1" not in enc.seen
        assert "claim ||| text 11" in enc.seen


class TestClassify:
    def test_probabilities_complement(self):
        enc = HashedTfidfEncoder(dim=32)
        params = NlisanParams.init(d=32, h=8, N=5, m=12, seed=1)
        result = classify(params, "claim words here", ["some evidence text"], enc)
        assert 0.0 <= result.p_true <= 1.0
        assert result.label in (ClaimLabel.TRUE, ClaimLabel.FALSE)

    def test_padded_slot_contents_cannot_change_output(self):
        rng = np.random.default_rng(7)
        params, S, I, mask = random_instance(rng, d=16, h=8, n_slots=6, n_present=2)
        base_loss, _ = loss_and_grads(params, S, I, mask, 1, want_grads=False)
        for _ in range(10):
            S2, I2 = S.copy(), I.copy()
            S2[~mask] = rng.standard_normal(S2[~mask].shape)
            I2[~mask] = rng.dirichlet(np.ones(3), size=int((~mask).sum()))
            new_loss, _ = loss_and_grads(params, S2, I2, mask, 1, want_grads=False)
            assert new_loss == base_loss  # exact, not approximate


class TestGradients:
    def test_gradient_check_at_spec_size(self):
        rng = np.random.default_rng(11)
        params, S, I, mask = random_instance(rng, d=16, h=8, n_slots=4, m=10,
                                             n_present=3)
        err = check_gradients(params, S, I, mask, label_idx=1, n_coords=120)
        assert err < 1e-4

    def test_masked_slot_parameter_has_zero_influence(self):
        rng = np.random.default_rng(12)
        params, S, I, mask = random_instance(rng, d=8, h=4, n_slots=4, m=6,
                                             n_present=2)
        _, grads = loss_and_grads(params, S, I, mask, 0)
        # W1 rows fed by an absent slot's (always zero) attention output
        absent_rows = slice(3 * params.h, 4 * params.h)
        assert np.all(grads["W1"][absent_rows] == 0.0)
        h = 1e-5
        orig = params.W1[3 * params.h, 0]
        params.W1[3 * params.h, 0] = orig + h
        up, _ = loss_and_grads(params, S, I, mask, 0, want_grads=False)
        params.W1[3 * params.h, 0] = orig - h
        down, _ = loss_and_grads(params, S, I, mask, 0, want_grads=False)
        params.W1[3 * params.h, 0] = orig
        assert abs(up - down) / (2 * h) < 1e-7

    def test_corrupted_gradient_detected(self):
        rng = np.random.default_rng(13)
        params, S, I, mask = random_instance(rng, d=16, h=8, n_slots=4, m=10,
                                             n_present=3)

        def corrupted(arrays):
            loss, grads = loss_and_grads(params, S, I, mask, 1)
            grads["W_V"] = grads["W_V"] * 1.5 + 0.01
            return loss, grads

        err = gradient_check(corrupted, params.arrays(), n_coords=120, seed=3)
        assert err > 1e-2


class TestTrain:
    def test_single_example_overfits(self):
        enc = HashedTfidfEncoder(dim=24)
        params = NlisanParams.init(d=24, h=8, N=4, m=10, seed=5)
        data = [("virus spreads indoors", ["virus spreads indoors says study"], True)]
        _, curve = train(params, data, enc, epochs=200, lr=1e-2, seed=0)
        assert curve[-1] < 0.01

    def test_zero_learning_rate_keeps_params(self):
        enc = HashedTfidfEncoder(dim=24)
        params = NlisanParams.init(d=24, h=8, N=4, m=10, seed=5)
        before = {k: v.copy() for k, v in params.arrays().items()}
        train(params, [("a b c", ["a b c"], True)], enc, epochs=3, lr=0.0, seed=0)
        for name, arr in params.arrays().items():
            np.testing.assert_array_equal(arr, before[name])

    def test_seed_reproducibility(self):
        enc = HashedTfidfEncoder(dim=24)
        data = nlisan_separable_dataset(n=10, seed=2)
        p1 = NlisanParams.init(d=24, h=8, N=4, m=10, seed=5)
        p2 = NlisanParams.init(d=24, h=8, N=4, m=10, seed=5)
        _, c1 = train(p1, data, enc, epochs=5, lr=1e-3, seed=9)
        _, c2 = train(p2, data, enc, epochs=5, lr=1e-3, seed=9)
        assert c1 == c2
        for name in p1.arrays():
            np.testing.assert_array_equal(p1.arrays()[name], p2.arrays()[name])

    def test_empty_dataset(self):
        enc = HashedTfidfEncoder(dim=24)
        params = NlisanParams.init(d=24, h=8, N=4, m=10)
        with pytest.raises(EmptyDataset):
            train(params, [], enc)


class TestToyVeracity:
    def test_engineered_claim_labelled_false_after_training(self):
        enc = HashedTfidfEncoder(dim=32)
        claim = "coronavirus is genetically engineered"
        refuting = ["scientists debunked the engineered coronavirus myth entirely",
                    "genome analysis shows natural origin not engineered in a lab"]
        toy_set = [
            (claim, refuting, False),
            ("hand washing prevents infection",
             ["hygiene studies confirm hand washing prevents infection spread"], True),
            ("masks reduce transmission",
             ["trials found masks reduce transmission of droplets"], True),
            ("vitamin c cures coronavirus",
             ["reviews found the vitamin c cure claim is a false hoax"], False),
        ]
        params = NlisanParams.init(d=32, h=8, N=4, m=16, seed=0)
        train(params, toy_set, enc, epochs=300, lr=5e-3, seed=0)
        result = classify(params, claim, refuting, enc)
        assert result.label is ClaimLabel.FALSE


class TestCheckpoint:
    @pytest.mark.parametrize("binary", [False, True])
    def test_round_trip(self, tmp_path, binary):
        params = NlisanParams.init(d=12, h=6, N=3, m=8, seed=42)
        path = tmp_path / "model.ckpt"
        params.save(path, binary=binary)
        loaded = NlisanParams.load(path)
        assert (loaded.d, loaded.h, loaded.N, loaded.m) == (12, 6, 3, 8)
        for name in params.arrays():
            np.testing.assert_array_equal(loaded.arrays()[name], params.arrays()[name])

    def test_shape_validation(self, tmp_path):
        params = NlisanParams.init(d=12, h=6, N=3, m=8)
        path = tmp_path / "model.ckpt"
        params.save(path)
        text = path.read_bytes().decode("utf-8")
        # claim a different hidden width in the header
        path.write_bytes(text.replace('"m": 8', '"m": 9').encode("utf-8"))
        with pytest.raises(BadCheckpoint):
            NlisanParams.load(path)

    def test_fixed_seed_checkpoints_are_bytewise_identical(self, tmp_path):
        enc = HashedTfidfEncoder(dim=24)
        data = nlisan_separable_dataset(n=6, seed=0)
        paths = []
        for run in range(2):
            params = NlisanParams.init(d=24, h=8, N=4, m=10, seed=3)
            train(params, data, enc, epochs=3, lr=1e-3, seed=4)
            path = tmp_path / f"run{run}.ckpt"
            params.save(path)
            paths.append(path)
        assert paths[0].read_bytes() == paths[1].read_bytes()
