"""Stance inference: built-in triplets, argmax mapping, external adapter."""

import json
import socket
import socketserver
import threading

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from panacea.corpus import Stance
from panacea.errors import InvalidTriplet
from panacea.inference import (
    BuiltinNli,
    ExternalNliProvider,
    NliTriplet,
    builtin_nli,
    stance_of,
    tweet_stances,
)


class TestBuiltinNli:
    def test_identical_texts_entail(self):
        t = builtin_nli("x y z", "x y z")
        assert stance_of(t) == Stance.SUPPORT
        assert t.p_entailment > t.p_neutral > 0

    def test_negated_overlap_contradicts(self):
        t = builtin_nli("vaccine is safe", "vaccine is not safe")
        assert stance_of(t) == Stance.REFUTE

    def test_disjoint_texts_neutral(self):
        t = builtin_nli("apples grow", "tides rise")
        assert stance_of(t) == Stance.NEUTRAL

    def test_double_negation_cancels(self):
        t = builtin_nli("masks are not useless no", "masks useless")
        # two cues -> even parity -> entailment side
        assert t.p_entailment > t.p_contradiction

    def test_nt_contraction_counts_as_cue(self):
        t = builtin_nli("vaccines don't work", "vaccines work")
        assert stance_of(t) == Stance.REFUTE

    @given(st.text(max_size=80), st.text(max_size=80))
    @settings(max_examples=150)
    def test_triplet_is_distribution_with_floor(self, premise, hypothesis):
        t = builtin_nli(premise, hypothesis)
        assert abs(sum(t.as_tuple()) - 1.0) < 1e-9
        assert all(p >= 0.01 for p in t.as_tuple())

    @given(st.text(max_size=60), st.text(max_size=60))
    @settings(max_examples=100)
    def test_stance_total_on_all_strings(self, premise, hypothesis):
        assert stance_of(builtin_nli(premise, hypothesis)) in set(Stance)


class TestStanceOf:
    def test_argmax_refute(self):
        assert stance_of(NliTriplet(0.7, 0.2, 0.1)) == Stance.REFUTE

    def test_argmax_support(self):
        assert stance_of(NliTriplet(0.1, 0.2, 0.7)) == Stance.SUPPORT

    def test_three_way_tie_resolves_refute(self):
        third = 1.0 / 3.0
        assert stance_of(NliTriplet(third, third, third)) == Stance.REFUTE

    def test_support_neutral_tie_resolves_support(self):
        assert stance_of(NliTriplet(0.1, 0.45, 0.45)) == Stance.SUPPORT

    def test_invalid_sum_raises(self):
        with pytest.raises(InvalidTriplet):
            stance_of(NliTriplet(0.5, 0.5, 0.5))

    def test_negative_component_raises(self):
        with pytest.raises(InvalidTriplet):
            stance_of(NliTriplet(-0.1, 0.6, 0.5))


class TestTweetStances:
    def test_empty_list(self):
        assert tweet_stances("claim", []) == []

    def test_tweet_equal_to_claim_supports(self):
        assert tweet_stances("masks work well", ["masks work well"]) == [Stance.SUPPORT]

    def test_matches_per_tweet_composition(self):
        provider = BuiltinNli()
        claim = "vitamin c cures coronavirus"
        tweets = [f"tweet number {i} about vitamin c" if i % 2 else f"no cure {i} hoax"
                  for i in range(20)]
        batch = tweet_stances(claim, tweets, provider)
        singles = [stance_of(provider.infer(t, claim)) for t in tweets]
        assert batch == singles


class _FixedNliHandler(socketserver.StreamRequestHandler):
    def handle(self):
        self.rfile.readline()
        self.wfile.write(
            (json.dumps({"contradiction": 0.8, "neutral": 0.15, "entailment": 0.05}) + "\n")
            .encode("utf-8"))


class TestExternalProvider:
    def test_reads_remote_triplet(self):
        server = socketserver.ThreadingTCPServer(("127.0.0.1", 0), _FixedNliHandler)
        port = server.server_address[1]
        thread = threading.Thread(target=server.serve_forever, daemon=True)
        thread.start()
        try:
            provider = ExternalNliProvider(port=port, timeout=2.0)
            t = provider.infer("p", "h")
            assert t.p_contradiction == pytest.approx(0.8)
            assert stance_of(t) == Stance.REFUTE
        finally:
            server.shutdown()
            server.server_close()

    def test_falls_back_to_builtin_on_dead_port(self):
        with socket.socket() as probe:
            probe.bind(("127.0.0.1", 0))
            free_port = probe.getsockname()[1]
        provider = ExternalNliProvider(port=free_port, timeout=0.2)
        t = provider.infer("x y z", "x y z")
        assert stance_of(t) == Stance.SUPPORT  # built-in behaviour
