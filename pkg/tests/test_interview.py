import pytest

from tomsim.interview import (
    AffectVector,
    AffectVectorError,
    Assessment,
    FAREWELL,
    InterviewComplete,
    InterviewSession,
    interpret_affects,
)
from tomsim.logic import deg_eq

CALM = AffectVector()
KEEN = AffectVector(focused=0.9)
SHAKY = AffectVector(hesitating=0.8)


def topic(doc, topic_id):
    for t in doc.topics:
        if t.id == topic_id:
            return t
    raise KeyError(topic_id)


class TestAffectVector:
    def test_exactly_eight_channels(self):
        with pytest.raises(AffectVectorError) as err:
            AffectVector.from_dict({"relieved": 0.5})
        assert "missing" in str(err.value)
        with pytest.raises(AffectVectorError):
            AffectVector.from_dict(
                {c: 0.0 for c in (
                    "relieved", "embarrassed", "hesitating", "stressed",
                    "ill_at_ease", "focused", "aggressive", "bored", "extra",
                )}
            )

    def test_range_validation(self):
        with pytest.raises(AffectVectorError) as err:
            AffectVector(focused=1.2)
        assert "focused" in str(err.value.fields)


class TestInterpretAffects:
    def test_hesitation_lowers_qualification(self, interview_doc):
        facts, deltas = interpret_affects(topic(interview_doc, "job_description"), SHAKY)
        assert deg_eq(deltas["qualification"], -0.16)
        assert any("candidate_is_qualified" in str(f[1]) for f in facts)
        # the asserted belief says the qualification is lacking
        name, content, degree = facts[0]
        assert name == "tt:job_description:hesitating"
        assert deg_eq(degree, 0.9)

    def test_focus_raises_confidence(self, interview_doc):
        facts, deltas = interpret_affects(topic(interview_doc, "self_introduction"), KEEN)
        assert deg_eq(deltas["self_confidence"], 0.18)

    def test_all_zero_no_deltas(self, interview_doc):
        for t in interview_doc.topics:
            facts, deltas = interpret_affects(t, CALM)
            assert facts == [] and deltas == {}

    def test_boundary_is_strict(self, interview_doc):
        half = AffectVector(hesitating=0.5)
        facts, deltas = interpret_affects(topic(interview_doc, "job_description"), half)
        assert deltas == {}


class TestAssessment:
    def test_componentwise_add(self):
        got = Assessment().apply({"self_confidence": 0.2, "qualification": -0.1})
        assert got == Assessment(0.2, 0.0, -0.1)

    def test_clamped(self):
        got = Assessment(0.95, 0.0, 0.0).apply({"self_confidence": 0.2})
        assert got.self_confidence == 1.0
        low = Assessment(-0.95, 0.0, 0.0).apply({"self_confidence": -0.2})
        assert low.self_confidence == -1.0

    def test_commuting_deltas(self):
        a = Assessment().apply({"motivation": -0.1}).apply({"qualification": 0.2})
        b = Assessment().apply({"qualification": 0.2}).apply({"motivation": -0.1})
        assert a == b


class TestSelection:
    def test_profile_b_follows_declared_order(self, interview_doc):
        session = InterviewSession(interview_doc, "B")
        order = [session.asked[0][0]]
        while not session.done:
            session.post_turn("answer", KEEN)
            if session.asked[-1][0] not in order:
                order.append(session.asked[-1][0])
        assert order == [t.id for t in interview_doc.topics]
        assert all(variant == "neutral" for _, variant in session.asked)

    def test_profile_c_opens_with_the_sensitive_salary_question(self, interview_doc):
        session = InterviewSession(interview_doc, "C")
        assert session.asked[0] == ("salary", "embarrassing")

    def test_impact_consulted_for_every_selection(self, interview_doc):
        for pid in ("A", "C"):
            session = InterviewSession(interview_doc, pid)
            while not session.done:
                session.post_turn("answer", CALM)
            impact_records = [r for r in session.records if r.rule == "predict_impact"]
            selections = len(session.asked)
            assert len(impact_records) >= selections
        neutral = InterviewSession(interview_doc, "B")
        while not neutral.done:
            neutral.post_turn("answer", CALM)
        assert all(r.rule != "predict_impact" for r in neutral.records)

    def test_profiles_diverge_on_identical_stream(self, interview_doc):
        picks = {}
        for pid in ("A", "B", "C"):
            session = InterviewSession(interview_doc, pid)
            sequence = [session.asked[0]]
            while not session.done:
                session.post_turn("same answer", SHAKY)
                if len(session.asked) > len(sequence):
                    sequence.append(session.asked[-1])
            picks[pid] = sequence
        assert picks["A"] != picks["B"]
        assert picks["C"] != picks["B"]
        assert picks["A"] != picks["C"]

    def test_b_selection_independent_of_affects(self, interview_doc):
        streams = [CALM, KEEN, SHAKY, AffectVector(bored=1.0)]
        sequences = []
        for stream in streams:
            session = InterviewSession(interview_doc, "B")
            seq = [session.asked[0]]
            while not session.done:
                session.post_turn("x", stream)
                if len(session.asked) > len(seq):
                    seq.append(session.asked[-1])
            sequences.append(seq)
        assert all(seq == sequences[0] for seq in sequences)


class TestCompleteness:
    def test_every_topic_asked_exactly_once(self, interview_doc):
        for pid in ("A", "B", "C"):
            session = InterviewSession(interview_doc, pid)
            turns = 0
            while not session.done:
                result = session.post_turn("answer", CALM)
                turns += 1
                assert turns <= len(interview_doc.topics) + 1
            topics_asked = [t for t, _ in session.asked]
            assert sorted(topics_asked) == sorted(t.id for t in interview_doc.topics)
            assert result.interview_done
            assert result.utterance == FAREWELL

    def test_post_after_done_rejected(self, interview_doc):
        session = InterviewSession(interview_doc, "B")
        while not session.done:
            session.post_turn("answer", CALM)
        with pytest.raises(InterviewComplete):
            session.post_turn("answer", CALM)


class TestValence:
    def test_valence_moves_with_confidence_signal(self, interview_doc):
        # emotions triggered by a turn are felt from the next tick on, so
        # the confidence signal read during self-introduction (turn 2 for
        # the neutral profile) shows in the valence one turn later
        session = InterviewSession(interview_doc, "B")
        results = [session.post_turn("answer", KEEN) for _ in range(3)]
        assert results[0].recruiter_valence == 0.0
        assert results[2].recruiter_valence > 0

    def test_valence_stable_on_zero_affects(self, interview_doc):
        session = InterviewSession(interview_doc, "B")
        values = [session.post_turn("answer", CALM).recruiter_valence for _ in range(3)]
        assert values[0] == values[1] == values[2]

    def test_boredom_drags_valence_down(self, interview_doc):
        bored = AffectVector(bored=0.9)
        session = InterviewSession(interview_doc, "B")
        last = None
        for _ in range(3):
            last = session.post_turn("answer", bored)
        assert last.recruiter_valence < 0
        assert last.assessment.motivation < 0
